use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{Interval, Jet, JetField, PotentialField, SolutionOracle};

use super::chain::DarbouxChain;

/// `h f = −fₓₓ + U f` on a jet; the result has two orders fewer.
pub fn apply_hamiltonian(potential: &dyn PotentialField, f: &Jet, x: f64, t: f64) -> Result<Jet> {
    if f.order() < 2 {
        return Err(Error::capability("applying the Hamiltonian", 2, f.order()));
    }
    let order = f.order() - 2;
    let u = potential.jet(x, t, order)?;
    let second = f.differentiate().differentiate();
    Ok(&(&u * &f.truncate(order)) - &second)
}

/// The transformed potential `U_N` of a chain.
#[derive(Debug, Clone)]
pub struct TransformedPotential {
    chain: Arc<DarbouxChain>,
}

impl TransformedPotential {
    pub fn new(chain: &Arc<DarbouxChain>) -> Self {
        TransformedPotential {
            chain: chain.clone(),
        }
    }

    pub fn chain(&self) -> &Arc<DarbouxChain> {
        &self.chain
    }
}

impl PotentialField for TransformedPotential {
    fn value(&self, x: f64, t: f64) -> Result<f64> {
        self.chain.potential_value(x, t)
    }

    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        self.chain.potential_jet(x, t, order)
    }

    fn domain(&self) -> Interval {
        self.chain.seed_potential().domain()
    }

    fn label(&self) -> String {
        self.chain.label()
    }

    fn is_stationary(&self) -> bool {
        self.chain.is_stationary()
    }
}

/// `Lψ` as a solution of the transformed equation.
#[derive(Debug, Clone)]
pub struct ChainImage {
    chain: Arc<DarbouxChain>,
    psi: Arc<dyn SolutionOracle>,
}

impl ChainImage {
    pub fn new(chain: &Arc<DarbouxChain>, psi: Arc<dyn SolutionOracle>) -> Result<Self> {
        let expected = chain.seed_potential().label();
        if psi.potential().label() != expected {
            return Err(Error::domain(format!(
                "{} does not solve the chain's seed equation ({expected})",
                psi.label()
            )));
        }
        Ok(ChainImage {
            chain: chain.clone(),
            psi,
        })
    }

    pub fn source(&self) -> &Arc<dyn SolutionOracle> {
        &self.psi
    }
}

impl JetField for ChainImage {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        self.chain.apply_jet(self.psi.as_ref(), x, t, order)
    }

    fn max_order(&self) -> usize {
        let seeds = self.chain.seeds().iter().map(|s| s.max_order()).min().unwrap_or(0);
        seeds.min(self.psi.max_order()).saturating_sub(self.chain.order())
    }

    fn label(&self) -> String {
        format!("L[{}]({})", self.chain.seed_labels().join(", "), self.psi.label())
    }
}

impl SolutionOracle for ChainImage {
    fn potential(&self) -> Arc<dyn PotentialField> {
        Arc::new(TransformedPotential::new(&self.chain))
    }

    fn eigenvalue(&self) -> Option<f64> {
        if self.chain.is_stationary() {
            self.psi.eigenvalue()
        } else {
            None
        }
    }
}

/// `L⁺χ` for a stationary chain.
#[derive(Debug, Clone)]
pub struct AdjointImage {
    chain: Arc<DarbouxChain>,
    chi: Arc<dyn JetField>,
}

impl AdjointImage {
    pub fn new(chain: &Arc<DarbouxChain>, chi: Arc<dyn JetField>) -> Result<Self> {
        if !chain.is_stationary() {
            return Err(Error::Unsupported(
                "the adjoint chain is only defined for stationary seed potentials with known constants".into(),
            ));
        }
        Ok(AdjointImage {
            chain: chain.clone(),
            chi,
        })
    }
}

impl JetField for AdjointImage {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        self.chain.adjoint_apply_jet(self.chi.as_ref(), x, t, order)
    }

    fn max_order(&self) -> usize {
        let seeds = self.chain.seeds().iter().map(|s| s.max_order()).min().unwrap_or(0);
        let n = self.chain.order();
        (seeds + 1)
            .saturating_sub(2 * n)
            .min(self.chi.max_order().saturating_sub(n))
    }

    fn label(&self) -> String {
        format!("L+[{}]({})", self.chain.seed_labels().join(", "), self.chi.label())
    }
}

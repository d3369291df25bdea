//! Report types shared by the sampled axiom checks.

use serde::Serialize;

/// A concrete input at which a checked relation was evaluated, with both sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub inputs: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    pub fn new(inputs: impl Into<Vec<f64>>, lhs: f64, rhs: f64) -> Self {
        Witness {
            inputs: inputs.into(),
            lhs,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomOutcome {
    pub axiom: String,
    pub passed: bool,
    /// Informational outcomes are reported but do not affect [`AxiomReport::passed`].
    pub gating: bool,
    pub checked: usize,
    /// Largest amount by which the relation was violated (0 when it never was).
    pub worst_violation: f64,
    /// The first violating input in evaluation order.
    pub witness: Option<Witness>,
}

/// Accumulates one axiom's violations while samples stream in.
#[derive(Debug, Clone)]
pub struct Tally {
    axiom: String,
    gating: bool,
    tol: f64,
    checked: usize,
    worst: f64,
    witness: Option<Witness>,
}

impl Tally {
    pub fn new(axiom: impl Into<String>, tol: f64) -> Self {
        Tally {
            axiom: axiom.into(),
            gating: true,
            tol,
            checked: 0,
            worst: 0.0,
            witness: None,
        }
    }

    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }

    /// Record a sample whose violation amount is `violation` (<= 0 means satisfied).
    pub fn observe(&mut self, violation: f64, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        if v > self.tol {
            if v > self.worst {
                self.worst = v;
            }
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn finish(self) -> AxiomOutcome {
        AxiomOutcome {
            passed: self.witness.is_none(),
            axiom: self.axiom,
            gating: self.gating,
            checked: self.checked,
            worst_violation: self.worst,
            witness: self.witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub subject: String,
    pub seed: Option<u64>,
    pub tol: f64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    /// True when every gating outcome passed.
    pub fn passed(&self) -> bool {
        self.outcomes.iter().filter(|o| o.gating).all(|o| o.passed)
    }

    pub fn outcome(&self, axiom: &str) -> Option<&AxiomOutcome> {
        self.outcomes.iter().find(|o| o.axiom == axiom)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_keeps_first_witness_and_worst_amount() {
        let mut t = Tally::new("x", 1e-9);
        t.observe(0.0, || unreachable!());
        t.observe(0.1, || Witness::new(vec![1.0], 0.0, 0.1));
        t.observe(0.5, || Witness::new(vec![2.0], 0.0, 0.5));
        let o = t.finish();
        assert!(!o.passed);
        assert_eq!(o.checked, 3);
        assert_eq!(o.worst_violation, 0.5);
        assert_eq!(o.witness.unwrap().inputs, vec![1.0]);
    }

    #[test]
    fn informational_failures_do_not_gate() {
        let mut t = Tally::new("positivity", 0.0).informational();
        t.observe(1.0, || Witness::new(vec![0.5], 0.0, 0.0));
        let report = AxiomReport {
            subject: "s".into(),
            seed: None,
            tol: 0.0,
            outcomes: vec![t.finish()],
        };
        assert!(report.passed());
        assert_eq!(report.failures().count(), 1);
    }
}

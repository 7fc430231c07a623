//! The acceptance suite: one function per criterion, each returning a
//! structured pass/fail report with the measured numbers.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CriterionReport {
    fn new(id: u32, name: &str) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: String) {
        self.passed &= ok;
        self.details
            .push(format!("[{}] {msg}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, msg: String) {
        self.details.push(format!("[--] {msg}"));
    }

    /// One-line summary used by the CLI and the test harness.
    pub fn summary(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

pub fn run_criterion(id: u32, seed: u64) -> CriterionReport {
    match id {
        1 => criteria::de_gennes_anchor(),
        2 => criteria::uniform_field_sanity(),
        3 => criteria::bound_sandwich(),
        4 => criteria::moment_identities(),
        5 => criteria::trial_state_bound(),
        6 => criteria::region_energy_lemmas(),
        7 => criteria::bound_state_2d(seed),
        8 => criteria::essential_spectrum_threshold(seed),
        9 => criteria::application_sweep(seed),
        10 => criteria::ims_identity(seed),
        _ => panic!("criteria are numbered 1..=10"),
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    (1..=10).map(|i| run_criterion(i, seed)).collect()
}

mod criteria;
pub use criteria::shared;

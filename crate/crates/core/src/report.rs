use serde::Serialize;

/// Outcome of a numeric identity check over a batch of sample points.
#[derive(Clone, Debug, Serialize)]
pub struct NumReport {
    pub suite: String,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Description of the sample with the largest error.
    pub worst: Option<String>,
}

impl NumReport {
    pub fn new(suite: &str, tolerance: f64) -> Self {
        Self { suite: suite.into(), samples: 0, max_error: 0.0, tolerance, passed: true, worst: None }
    }

    pub fn record(&mut self, err: f64, what: impl FnOnce() -> String) {
        self.samples += 1;
        let err = if err.is_nan() { f64::INFINITY } else { err };
        if err > self.max_error || (self.worst.is_none() && err >= self.max_error) {
            self.max_error = err;
            self.worst = Some(what());
        }
        self.passed = self.max_error < self.tolerance;
    }

    /// Folds another report into this one (same suite, combined samples).
    pub fn merge(&mut self, other: NumReport) {
        self.samples += other.samples;
        if other.max_error > self.max_error {
            self.max_error = other.max_error;
            self.worst = other.worst;
        }
        self.passed = self.max_error < self.tolerance;
    }
}

/// `|a − b| / max(|a|, |b|)`, or the absolute difference when both are tiny.
pub fn rel_err(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale < 1e-300 {
        0.0
    } else {
        (a - b).norm() / scale.max(1e-300)
    }
}

/// Complex number as `{"re": …, "im": …}` rounded to 15 significant digits.
pub fn complex_json(c: num_complex::Complex64) -> serde_json::Value {
    let r = |x: f64| -> f64 {
        if x == 0.0 || !x.is_finite() {
            x
        } else {
            format!("{x:.14e}").parse().unwrap_or(x)
        }
    };
    serde_json::json!({"re": r(c.re), "im": r(c.im)})
}

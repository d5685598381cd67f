/// A yes/no classification together with the number it was decided from.
///
/// The verdict holds exactly when `margin >= -tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub margin: f64,
    pub tol: f64,
}

impl Verdict {
    pub fn new(margin: f64, tol: f64) -> Self {
        Self { margin, tol }
    }

    pub fn holds(&self) -> bool {
        self.margin >= -self.tol
    }
}

/// One named structural condition with a signed margin.
///
/// Non-negative margins (up to `tol`) mean the condition is satisfied.
/// `value == None` marks a condition that was skipped, e.g. a Schur
/// complement test when the matrix to invert is singular.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub name: &'static str,
    pub value: Option<f64>,
    pub tol: f64,
}

impl Margin {
    pub fn new(name: &'static str, value: f64, tol: f64) -> Self {
        Self {
            name,
            value: Some(value),
            tol,
        }
    }

    pub fn skipped(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            value: None,
            tol,
        }
    }

    /// Skipped conditions count as passed.
    pub fn passed(&self) -> bool {
        self.value.is_none_or(|v| v >= -self.tol)
    }
}

/// Looks a margin up by name.
pub fn find_margin<'a>(margins: &'a [Margin], name: &str) -> Option<&'a Margin> {
    margins.iter().find(|m| m.name == name)
}

use crate::error::{Error, Result};
use crate::perm::factorial;

/// Largest `n` ever attempted, even with the override.
pub const ABSOLUTE_MAX_DEGREE: usize = 9;

/// Caps on the size of `Lie(n)` models: `n <= 8` at `p = 2`, `n <= 7`
/// otherwise; `force` lifts the cap to [`ABSOLUTE_MAX_DEGREE`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResourceLimits {
    pub force: bool,
}

impl ResourceLimits {
    pub fn forced() -> Self {
        ResourceLimits { force: true }
    }

    pub fn max_degree(&self, p: u32) -> usize {
        match (self.force, p) {
            (true, _) => ABSOLUTE_MAX_DEGREE,
            (false, 2) => 8,
            (false, _) => 7,
        }
    }

    /// Refuses matrix models of `Lie(n)` beyond the cap, with a cost estimate.
    pub fn check(&self, n: usize, p: u32) -> Result<()> {
        if n <= self.max_degree(p) {
            return Ok(());
        }
        let dim = factorial(n.saturating_sub(1));
        let cost = match dim {
            Some(d) => {
                let bytes = (d as f64) * (d as f64) * std::mem::size_of::<crate::linalg::Elem>() as f64;
                format!("{d}-dimensional dense matrices, about {} each", human_bytes(bytes))
            }
            None => "matrices whose dimension overflows the index type".into(),
        };
        let hint = if n <= ABSOLUTE_MAX_DEGREE {
            "; pass --force to attempt it anyway"
        } else {
            "; this is beyond the supported range"
        };
        Err(Error::Resource(format!(
            "Lie({n}) at p = {p} needs {cost} (cap n <= {}){hint}",
            self.max_degree(p)
        )))
    }
}

fn human_bytes(b: f64) -> String {
    const UNITS: [&str; 5] = ["B", "KB", "MB", "GB", "TB"];
    let mut v = b;
    let mut u = 0;
    while v >= 1000.0 && u + 1 < UNITS.len() {
        v /= 1000.0;
        u += 1;
    }
    format!("{v:.1} {}", UNITS[u])
}

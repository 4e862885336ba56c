//! Low-demand safety integrity level bands (IEC 61508). Informative only.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SilBand {
    None,
    Sil1,
    Sil2,
    Sil3,
    Sil4,
}

impl SilBand {
    /// `[1e-5, 1e-4)` is SIL 4, `[1e-4, 1e-3)` SIL 3, `[1e-3, 1e-2)` SIL 2,
    /// `[1e-2, 1e-1)` SIL 1; anything else has no band.
    pub fn from_pfd_avg(pfd_avg: f64) -> Self {
        match pfd_avg {
            p if (1e-5..1e-4).contains(&p) => SilBand::Sil4,
            p if (1e-4..1e-3).contains(&p) => SilBand::Sil3,
            p if (1e-3..1e-2).contains(&p) => SilBand::Sil2,
            p if (1e-2..1e-1).contains(&p) => SilBand::Sil1,
            _ => SilBand::None,
        }
    }
}

impl fmt::Display for SilBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SilBand::None => "none",
            SilBand::Sil1 => "SIL 1",
            SilBand::Sil2 => "SIL 2",
            SilBand::Sil3 => "SIL 3",
            SilBand::Sil4 => "SIL 4",
        })
    }
}

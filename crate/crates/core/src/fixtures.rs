//! Two hand-picked `k = 2` trace sets for plotting the quadratic band
//! coefficient.
//!
//! In the second set the entry `3` is `psi_2(M-)`. Its original label reads
//! `psi_1(M-)`, which is already assigned, so it is taken as a typo.
//!
//! With the derivative functional `l'` as defined in
//! [`crate::eigendata::l_theta_prime`], neither set produces interior
//! extrema of the quadratic coefficient. Reading the listed derivatives in
//! the inner tangential coordinate of each junction point
//! ([`DerivativeConvention::InnerTangent`], which flips the sign at `M-`)
//! does: the first set then peaks at `theta = pi`, the second at two points
//! placed symmetrically about `pi`. Both readings are available so the
//! difference can be inspected.

use alloc::vec;

use crate::eigendata::{CellEigenData, TraceData};

/// How the listed derivative entries map to `d psi / d x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeConvention {
    /// Entries are `d psi / d x2` at both points (the default reading).
    #[default]
    AlongX2,
    /// Entries are derivatives along the rescaled tangential coordinate of
    /// each junction, which runs along `-x2` at `M-` and `+x2` at `M+`.
    InnerTangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureCase {
    One,
    Two,
}

impl FigureCase {
    pub fn from_index(index: u32) -> Option<Self> {
        match index {
            1 => Some(Self::One),
            2 => Some(Self::Two),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::One => "figure-case-1",
            Self::Two => "figure-case-2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "figure-case-1" => Some(Self::One),
            "figure-case-2" => Some(Self::Two),
            _ => None,
        }
    }

    pub fn data(self) -> CellEigenData {
        self.data_with(DerivativeConvention::AlongX2)
    }

    pub fn data_with(self, convention: DerivativeConvention) -> CellEigenData {
        // (value_plus, value_minus, deriv_plus, deriv_minus) per eigenfunction
        let raw: [[f64; 4]; 2] = match self {
            Self::One => [[1.0, 2.0, 1.5, 2.5], [1.0, 3.0, 0.5, 2.0]],
            Self::Two => [[1.0, 2.0, 1.5, 2.5], [-1.0, 3.0, -0.5, 2.0]],
        };
        let minus_sign = match convention {
            DerivativeConvention::AlongX2 => 1.0,
            DerivativeConvention::InnerTangent => -1.0,
        };
        let traces = raw
            .iter()
            .map(|r| TraceData::real(r[0], r[1], r[2], minus_sign * r[3]))
            .collect();
        // lambda0 is not part of the listed data; any value works.
        CellEigenData::new_non_degenerate(0.0, traces).expect("fixture data is valid")
    }
}

pub fn figure_case_1() -> CellEigenData {
    FigureCase::One.data()
}

pub fn figure_case_2() -> CellEigenData {
    FigureCase::Two.data()
}

/// Single constant Neumann mode on a cell of the given area.
pub fn constant_mode(area: f64, lambda0: f64) -> CellEigenData {
    let v = 1.0 / libm::sqrt(area);
    CellEigenData::new(lambda0, vec![TraceData::real(v, v, 0.0, 0.0)])
        .expect("constant mode is finite")
}

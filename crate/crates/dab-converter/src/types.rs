//! Parameter types shared across the converter model.

use serde::{Deserialize, Serialize};

use crate::error::{ConverterError, Result};

/// Modulation strategy for the dual active bridge.
///
/// Both strategies drive each bridge leg at 50% duty. They differ in which
/// bridge carries the inner shift that narrows its terminal voltage into a
/// three-level waveform: `Eps1` narrows the primary, `Eps2` narrows the
/// secondary. With an inner shift of 1 both degenerate to the plain
/// two-level phase shift waveform and become indistinguishable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    Eps1,
    Eps2,
}

impl Strategy {
    /// Numeric encoding used in datasets and map files: Eps1 = 0, Eps2 = 1.
    pub fn code(self) -> u8 {
        match self {
            Strategy::Eps1 => 0,
            Strategy::Eps2 => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Strategy::Eps1),
            1 => Ok(Strategy::Eps2),
            _ => Err(ConverterError::InvalidParameter {
                name: "strategy",
                reason: "must be 0 or 1",
                value: code as f64,
            }),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Eps1 => write!(f, "EPS1"),
            Strategy::Eps2 => write!(f, "EPS2"),
        }
    }
}

/// Device and magnetics parameters for the loss model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossModelParams {
    /// On-state resistance per switch (ohm).
    pub rds_on: f64,
    /// Effective output capacitance per switch (F), charge-equivalent.
    pub coss_eff: f64,
    /// Turn-on loss coefficient (J per V*A). Applied only to hard turn-on.
    pub k_on: f64,
    /// Turn-off loss coefficient (J per V*A). Applied to every turn-off.
    pub k_off: f64,
    /// Transformer winding resistance referred to the primary (ohm).
    pub r_w: f64,
    /// Core loss coefficient (W per Hz^alpha T^beta m^3). Zero disables the term.
    pub k_c: f64,
    /// Core loss frequency exponent.
    pub alpha: f64,
    /// Core loss flux density exponent.
    pub beta: f64,
    /// Primary winding turns, used for peak flux estimation.
    pub turns: f64,
    /// Core cross section (m^2).
    pub core_area: f64,
    /// Core volume (m^3).
    pub core_volume: f64,
}

impl Default for LossModelParams {
    fn default() -> Self {
        LossModelParams {
            rds_on: 0.08,
            coss_eff: 100e-12,
            k_on: 5e-8,
            k_off: 2e-8,
            r_w: 0.05,
            k_c: 0.0,
            alpha: 1.5,
            beta: 2.5,
            turns: 20.0,
            core_area: 4e-4,
            core_volume: 1e-4,
        }
    }
}

/// Fixed electrical parameters of one converter build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConverterSpec {
    /// Input dc-link voltage (V).
    pub v1: f64,
    /// Transformer turns ratio, primary over secondary.
    pub n: f64,
    /// Series inductance on the primary side (H).
    pub lr: f64,
    /// Switching frequency (Hz).
    pub fs: f64,
    /// Dead time inserted between complementary gate drives (s).
    pub t_dead: f64,
    /// Loss model parameters.
    pub loss: LossModelParams,
}

impl Default for ConverterSpec {
    fn default() -> Self {
        ConverterSpec {
            v1: 200.0,
            n: 1.0,
            lr: 167e-6,
            fs: 20e3,
            t_dead: 400e-9,
            loss: LossModelParams::default(),
        }
    }
}

impl ConverterSpec {
    /// Switching period (s).
    pub fn ts(&self) -> f64 {
        1.0 / self.fs
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("v1", self.v1)?;
        check_positive("n", self.n)?;
        check_positive("lr", self.lr)?;
        check_positive("fs", self.fs)?;
        if !(self.t_dead >= 0.0) || self.t_dead >= 0.05 * self.ts() {
            return Err(ConverterError::InvalidParameter {
                name: "t_dead",
                reason: "must lie in [0, Ts/20)",
                value: self.t_dead,
            });
        }
        Ok(())
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConverterError::InvalidParameter {
            name,
            reason: "must be finite and positive",
            value,
        })
    }
}

/// One modulation command: strategy plus the two shift ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationPoint {
    pub strategy: Strategy,
    /// Inner shift ratio in [0, 1]: width of the narrowed bridge voltage
    /// pulse as a fraction of the half period. 1 means full width.
    pub d_inner: f64,
    /// Outer shift ratio in [0, 0.5]: displacement between the centers of
    /// the two bridge voltage pulses as a fraction of the half period.
    /// Positive values transfer power from primary to secondary.
    pub d_outer: f64,
}

impl ModulationPoint {
    pub fn new(strategy: Strategy, d_inner: f64, d_outer: f64) -> Result<Self> {
        let point = ModulationPoint {
            strategy,
            d_inner,
            d_outer,
        };
        point.validate()?;
        Ok(point)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_inner >= 0.0 && self.d_inner <= 1.0) {
            return Err(ConverterError::InvalidParameter {
                name: "d_inner",
                reason: "must lie in [0, 1]",
                value: self.d_inner,
            });
        }
        if !(self.d_outer >= 0.0 && self.d_outer <= 0.5) {
            return Err(ConverterError::InvalidParameter {
                name: "d_outer",
                reason: "must lie in [0, 0.5]",
                value: self.d_outer,
            });
        }
        Ok(())
    }
}

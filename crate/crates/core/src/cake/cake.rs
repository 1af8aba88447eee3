use serde::{Deserialize, Serialize};

use super::{KnifeStyle, Piece};
use crate::arith::Scalar;
use crate::error::{Error, Result};

/// The resource being divided. A rectangle is addressed through its vertical
/// sweep coordinate: pieces are unions of full-height strips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cake {
    Interval { length: Scalar },
    Rect { width: Scalar, height: Scalar },
}

impl Cake {
    pub fn interval(length: Scalar) -> Result<Self> {
        let c = Cake::Interval { length };
        c.validate()?;
        Ok(c)
    }

    pub fn unit() -> Self {
        Cake::Interval {
            length: Scalar::one(),
        }
    }

    pub fn rect(width: Scalar, height: Scalar) -> Result<Self> {
        let c = Cake::Rect { width, height };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Cake::Interval { length } => length.is_positive(),
            Cake::Rect { width, height } => width.is_positive() && height.is_positive(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("cake must have positive finite volume"))
        }
    }

    /// Length of the sweep coordinate range `[0, L)`.
    pub fn sweep_length(&self) -> &Scalar {
        match self {
            Cake::Interval { length } => length,
            Cake::Rect { width, .. } => width,
        }
    }

    /// Volume carried by one unit of sweep length.
    pub fn volume_scale(&self) -> Scalar {
        match self {
            Cake::Interval { .. } => Scalar::one(),
            Cake::Rect { height, .. } => height.clone(),
        }
    }

    pub fn whole(&self) -> Piece {
        Piece::interval(Scalar::zero(), self.sweep_length().clone())
    }

    pub fn volume(&self, piece: &Piece) -> Scalar {
        self.volume_scale() * piece.length()
    }

    pub fn total_volume(&self) -> Scalar {
        self.volume(&self.whole())
    }

    pub fn contains(&self, piece: &Piece) -> bool {
        match piece.bounds() {
            None => true,
            Some((lo, hi)) => !lo.is_negative() && hi <= self.sweep_length(),
        }
    }

    pub fn check_contains(&self, piece: &Piece) -> Result<()> {
        if self.contains(piece) {
            Ok(())
        } else {
            Err(Error::domain(format!("piece {piece} lies outside the cake")))
        }
    }

    /// The knife family protocols should use on this cake; rectangles only
    /// offer the vertical sweep.
    pub fn knife_style(&self, requested: &KnifeStyle) -> KnifeStyle {
        match self {
            Cake::Interval { .. } => requested.clone(),
            Cake::Rect { height, .. } => KnifeStyle::Sweep(height.clone()),
        }
    }
}

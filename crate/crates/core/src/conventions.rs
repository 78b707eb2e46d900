//! Conventions fixed by validation rather than by construction.

/// How the generators of the type DD identity carry idempotents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DdConvention {
    /// `*_I` sits at `ι_I` on the left and `ι_{I^c}` on the right; each
    /// chord is paired with the chord of the same endpoints on the
    /// complementary occupied set. Both sides are over the same algebra.
    Complement,
    /// `*_I` sits at `ι_I` on both sides; each chord is paired with its
    /// rotated image in the algebra of the reversed diagram.
    Same,
}

/// The convention that passes both the DD structure equation and the
/// cancellation check.
pub const DD_CONVENTION: DdConvention = DdConvention::Complement;

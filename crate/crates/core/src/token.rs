//! Short inline identifiers for provinces and powers.
//!
//! Identifiers are stored inline (no allocation) so that units, orders and
//! deals stay `Copy`. Ordering is plain byte-wise string ordering, which is the
//! "alphabetical" tie-break used throughout the engine.

use core::fmt;
use core::str::FromStr;

/// Longest identifier accepted by [`Token`].
pub const MAX_TOKEN_LEN: usize = 7;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    // Zero padded; the derived ordering is therefore alphabetical.
    bytes: [u8; MAX_TOKEN_LEN],
    len: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TokenError {
    #[error("identifier is empty")]
    Empty,
    #[error("identifier `{0}` is longer than 7 bytes")]
    TooLong(alloc::string::String),
    #[error("identifier `{0}` must be ASCII alphanumeric or `_`")]
    BadChar(alloc::string::String),
}

impl Token {
    pub fn new(s: &str) -> Result<Self, TokenError> {
        if s.is_empty() {
            return Err(TokenError::Empty);
        }
        if s.len() > MAX_TOKEN_LEN {
            return Err(TokenError::TooLong(s.into()));
        }
        if !s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
            return Err(TokenError::BadChar(s.into()));
        }
        let mut bytes = [0u8; MAX_TOKEN_LEN];
        bytes[..s.len()].copy_from_slice(s.as_bytes());
        Ok(Token { bytes, len: s.len() as u8 })
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII is ever stored.
        core::str::from_utf8(&self.bytes[..self.len as usize]).unwrap_or("?")
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Token);

        impl $name {
            pub fn new(s: &str) -> Result<Self, TokenError> {
                Token::new(s).map($name)
            }

            pub fn as_str(&self) -> &str {
                self.0.as_str()
            }
        }

        impl FromStr for $name {
            type Err = TokenError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }
    };
}

id_newtype!(
    /// Province identifier, e.g. `VIE`.
    ProvinceId
);
id_newtype!(
    /// Power identifier, e.g. `AUS`.
    Power
);

/// Builds a [`ProvinceId`] from a literal. Panics on malformed input, so only
/// use it with constants.
pub fn prov(s: &str) -> ProvinceId {
    ProvinceId::new(s).expect("malformed province literal")
}

/// Builds a [`Power`] from a literal. Panics on malformed input.
pub fn power(s: &str) -> Power {
    Power::new(s).expect("malformed power literal")
}

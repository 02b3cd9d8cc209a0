//! Free commutative monoids over finite prime alphabets.
//!
//! An element is stored as a dense exponent vector indexed by the alphabet,
//! so iteration and serialization always follow alphabet order. Exponents
//! are `u64`; every arithmetic step is checked and reports
//! [`MonoidError::Overflow`] instead of wrapping.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("alphabet mismatch: [{left}] vs [{right}]")]
    AlphabetMismatch { left: String, right: String },
    #[error("arithmetic complexity is undefined for the identity")]
    UndefinedComplexity,
    #[error("types are undefined for the identity")]
    UndefinedType,
    #[error("the primitive root of the identity is undefined")]
    UndefinedRoot,
    #[error("exponent overflow")]
    Overflow,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid symbol name `{0}` (expected [A-Za-z0-9_]+)")]
    InvalidSymbol(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("explicit zero exponent for `{0}`")]
    ZeroExponent(String),
    #[error("expected {expected} exponents, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("malformed monoid element `{0}`")]
    Malformed(String),
    #[error("no image given for source prime `{0}`")]
    MissingImage(String),
}

/// An ordered finite set of prime symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeAlphabet {
    symbols: Vec<String>,
}

impl PrimeAlphabet {
    pub fn new<I, S>(symbols: I) -> Result<Arc<Self>, MonoidError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        for (i, s) in symbols.iter().enumerate() {
            if !is_symbol_name(s) {
                return Err(MonoidError::InvalidSymbol(s.clone()));
            }
            if symbols[..i].contains(s) {
                return Err(MonoidError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Arc::new(Self { symbols }))
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }
}

fn is_symbol_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_same(a: &PrimeAlphabet, b: &PrimeAlphabet) -> Result<(), MonoidError> {
    if a == b {
        Ok(())
    } else {
        Err(MonoidError::AlphabetMismatch {
            left: a.symbols.join(","),
            right: b.symbols.join(","),
        })
    }
}

/// An element of the free commutative monoid over a [`PrimeAlphabet`].
///
/// The identity is the all-zero exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonoidElement {
    alphabet: Arc<PrimeAlphabet>,
    exponents: Vec<u64>,
}

impl MonoidElement {
    pub fn identity(alphabet: &Arc<PrimeAlphabet>) -> Self {
        Self {
            alphabet: Arc::clone(alphabet),
            exponents: vec![0; alphabet.len()],
        }
    }

    pub fn prime(alphabet: &Arc<PrimeAlphabet>, symbol: &str) -> Result<Self, MonoidError> {
        Self::from_pairs(alphabet, [(symbol, 1)])
    }

    pub fn from_exponents(
        alphabet: &Arc<PrimeAlphabet>,
        exponents: Vec<u64>,
    ) -> Result<Self, MonoidError> {
        if exponents.len() != alphabet.len() {
            return Err(MonoidError::Arity {
                expected: alphabet.len(),
                got: exponents.len(),
            });
        }
        Ok(Self {
            alphabet: Arc::clone(alphabet),
            exponents,
        })
    }

    /// Builds an element from `(symbol, exponent)` pairs. Symbols must be
    /// known, distinct, and carry a positive exponent.
    pub fn from_pairs<'a, I>(alphabet: &Arc<PrimeAlphabet>, pairs: I) -> Result<Self, MonoidError>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut exponents = vec![0; alphabet.len()];
        let mut seen = vec![false; alphabet.len()];
        for (symbol, exp) in pairs {
            let i = alphabet
                .index_of(symbol)
                .ok_or_else(|| MonoidError::UnknownSymbol(symbol.to_owned()))?;
            if seen[i] {
                return Err(MonoidError::DuplicateSymbol(symbol.to_owned()));
            }
            if exp == 0 {
                return Err(MonoidError::ZeroExponent(symbol.to_owned()));
            }
            seen[i] = true;
            exponents[i] = exp;
        }
        Ok(Self {
            alphabet: Arc::clone(alphabet),
            exponents,
        })
    }

    /// Parses the text form: `1`, or factors `sym` / `sym^k` joined by `*`.
    /// Repeated factors accumulate.
    pub fn parse_text(alphabet: &Arc<PrimeAlphabet>, text: &str) -> Result<Self, MonoidError> {
        let text = text.trim();
        let mut out = Self::identity(alphabet);
        if text == "1" {
            return Ok(out);
        }
        let malformed = || MonoidError::Malformed(text.to_owned());
        for factor in text.split('*') {
            let factor = factor.trim();
            let (symbol, exp) = match factor.split_once('^') {
                Some((s, k)) => (s.trim(), k.trim().parse::<u64>().map_err(|_| malformed())?),
                None => (factor, 1),
            };
            if symbol.is_empty() || exp == 0 {
                return Err(malformed());
            }
            let i = alphabet
                .index_of(symbol)
                .ok_or_else(|| MonoidError::UnknownSymbol(symbol.to_owned()))?;
            out.exponents[i] = out.exponents[i]
                .checked_add(exp)
                .ok_or(MonoidError::Overflow)?;
        }
        Ok(out)
    }

    pub fn alphabet(&self) -> &Arc<PrimeAlphabet> {
        &self.alphabet
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn exponent(&self, symbol: &str) -> u64 {
        self.alphabet
            .index_of(symbol)
            .map_or(0, |i| self.exponents[i])
    }

    /// Nonzero `(symbol, exponent)` pairs in alphabet order.
    pub fn support(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (self.alphabet.symbol(i), e))
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Number of prime factors counted with multiplicity.
    pub fn degree(&self) -> Result<u64, MonoidError> {
        self.exponents
            .iter()
            .try_fold(0u64, |acc, &e| acc.checked_add(e))
            .ok_or(MonoidError::Overflow)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MonoidError> {
        check_same(&self.alphabet, &other.alphabet)?;
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a.checked_add(*b).ok_or(MonoidError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            alphabet: Arc::clone(&self.alphabet),
            exponents,
        })
    }

    pub fn pow(&self, k: u64) -> Result<Self, MonoidError> {
        let exponents = self
            .exponents
            .iter()
            .map(|e| e.checked_mul(k).ok_or(MonoidError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            alphabet: Arc::clone(&self.alphabet),
            exponents,
        })
    }

    /// If `self` divides `other`, returns the quotient `other / self`.
    pub fn divides(&self, other: &Self) -> Result<Option<Self>, MonoidError> {
        check_same(&self.alphabet, &other.alphabet)?;
        let exponents: Option<Vec<u64>> = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| b.checked_sub(*a))
            .collect();
        Ok(exponents.map(|exponents| Self {
            alphabet: Arc::clone(&self.alphabet),
            exponents,
        }))
    }

    /// Arithmetic complexity: number of prime factors minus one.
    pub fn complexity(&self) -> Result<u64, MonoidError> {
        if self.is_identity() {
            return Err(MonoidError::UndefinedComplexity);
        }
        Ok(self.degree()? - 1)
    }

    pub fn is_prime(&self) -> bool {
        self.degree() == Ok(1)
    }

    /// `Some((index, k))` when `self = p^k` for the prime at `index`, `k >= 1`.
    pub fn prime_power(&self) -> Option<(usize, u64)> {
        let mut found = None;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }

    /// All divisors strictly between the identity and `self`, in
    /// lexicographic order of exponent vectors (first symbol most
    /// significant).
    pub fn enumerate_types(&self) -> Result<Vec<Self>, MonoidError> {
        if self.is_identity() {
            return Err(MonoidError::UndefinedType);
        }
        let mut out = Vec::new();
        let mut current = vec![0u64; self.exponents.len()];
        loop {
            if current.iter().any(|&e| e > 0) && current != self.exponents {
                out.push(Self {
                    alphabet: Arc::clone(&self.alphabet),
                    exponents: current.clone(),
                });
            }
            // odometer, last coordinate fastest
            let mut i = current.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if current[i] < self.exponents[i] {
                    current[i] += 1;
                    break;
                }
                current[i] = 0;
            }
        }
    }

    /// Returns `(r, g)` with `g` the gcd of the exponents and `self = r^g`.
    pub fn primitive_root(&self) -> Result<(Self, u64), MonoidError> {
        let g = self.exponents.iter().fold(0, |acc, &e| gcd(acc, e));
        if g == 0 {
            return Err(MonoidError::UndefinedRoot);
        }
        let root = Self {
            alphabet: Arc::clone(&self.alphabet),
            exponents: self.exponents.iter().map(|e| e / g).collect(),
        };
        Ok((root, g))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        for (n, (symbol, exp)) in self.support().enumerate() {
            if n > 0 {
                f.write_str("*")?;
            }
            if exp == 1 {
                f.write_str(symbol)?;
            } else {
                write!(f, "{symbol}^{exp}")?;
            }
        }
        Ok(())
    }
}

/// A monoid homomorphism determined by the image of every source prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidHom {
    source: Arc<PrimeAlphabet>,
    target: Arc<PrimeAlphabet>,
    images: Vec<MonoidElement>,
}

impl MonoidHom {
    /// `images[i]` is the image of the i-th source symbol.
    pub fn new(
        source: &Arc<PrimeAlphabet>,
        target: &Arc<PrimeAlphabet>,
        images: Vec<MonoidElement>,
    ) -> Result<Self, MonoidError> {
        if images.len() != source.len() {
            return Err(MonoidError::Arity {
                expected: source.len(),
                got: images.len(),
            });
        }
        for image in &images {
            check_same(target, image.alphabet())?;
        }
        Ok(Self {
            source: Arc::clone(source),
            target: Arc::clone(target),
            images,
        })
    }

    /// Builds a hom from a `(source symbol, image)` assignment, which must be
    /// total on the source alphabet.
    pub fn from_assignment<'a, I>(
        source: &Arc<PrimeAlphabet>,
        target: &Arc<PrimeAlphabet>,
        assignment: I,
    ) -> Result<Self, MonoidError>
    where
        I: IntoIterator<Item = (&'a str, MonoidElement)>,
    {
        let mut images: Vec<Option<MonoidElement>> = vec![None; source.len()];
        for (symbol, image) in assignment {
            let i = source
                .index_of(symbol)
                .ok_or_else(|| MonoidError::UnknownSymbol(symbol.to_owned()))?;
            if images[i].is_some() {
                return Err(MonoidError::DuplicateSymbol(symbol.to_owned()));
            }
            images[i] = Some(image);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, image)| {
                image.ok_or_else(|| MonoidError::MissingImage(source.symbol(i).to_owned()))
            })
            .collect::<Result<_, _>>()?;
        Self::new(source, target, images)
    }

    pub fn identity(alphabet: &Arc<PrimeAlphabet>) -> Self {
        let images = (0..alphabet.len())
            .map(|i| {
                let mut exponents = vec![0; alphabet.len()];
                exponents[i] = 1;
                MonoidElement {
                    alphabet: Arc::clone(alphabet),
                    exponents,
                }
            })
            .collect();
        Self {
            source: Arc::clone(alphabet),
            target: Arc::clone(alphabet),
            images,
        }
    }

    pub fn source(&self) -> &Arc<PrimeAlphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PrimeAlphabet> {
        &self.target
    }

    pub fn images(&self) -> &[MonoidElement] {
        &self.images
    }

    pub fn image_of(&self, symbol: &str) -> Option<&MonoidElement> {
        self.source.index_of(symbol).map(|i| &self.images[i])
    }

    pub fn apply(&self, m: &MonoidElement) -> Result<MonoidElement, MonoidError> {
        check_same(&self.source, m.alphabet())?;
        let mut out = MonoidElement::identity(&self.target);
        for (image, &e) in self.images.iter().zip(m.exponents()) {
            if e > 0 {
                out = out.mul(&image.pow(e)?)?;
            }
        }
        Ok(out)
    }

    /// The composite `next ∘ self`.
    pub fn then(&self, next: &MonoidHom) -> Result<MonoidHom, MonoidError> {
        check_same(&self.target, &next.source)?;
        let images = self
            .images
            .iter()
            .map(|image| next.apply(image))
            .collect::<Result<_, _>>()?;
        Ok(MonoidHom {
            source: Arc::clone(&self.source),
            target: Arc::clone(&next.target),
            images,
        })
    }
}

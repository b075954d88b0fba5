//! Character predicates over 7-bit code points, as 128-bit sets.

use std::fmt;
use std::ops::Not;

/// A set of characters `0..128`. Satisfiable iff nonempty.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pred(pub u128);

impl Pred {
    pub const BOT: Pred = Pred(0);
    pub const TOP: Pred = Pred(u128::MAX);

    pub fn char(c: char) -> Option<Pred> {
        let b = c as u32;
        (b < 128).then(|| Pred(1u128 << b))
    }

    /// Inclusive range; empty if `lo > hi` or out of the alphabet.
    pub fn range(lo: char, hi: char) -> Pred {
        let (lo, hi) = (lo as u32, (hi as u32).min(127));
        if lo > hi {
            return Pred::BOT;
        }
        let width = hi - lo + 1;
        let bits = if width == 128 { u128::MAX } else { ((1u128 << width) - 1) << lo };
        Pred(bits)
    }

    pub fn digit() -> Pred {
        Pred::range('0', '9')
    }

    pub fn and(self, o: Pred) -> Pred {
        Pred(self.0 & o.0)
    }

    pub fn or(self, o: Pred) -> Pred {
        Pred(self.0 | o.0)
    }

    pub fn is_sat(self) -> bool {
        self.0 != 0
    }

    pub fn contains(self, c: char) -> bool {
        (c as u32) < 128 && self.0 >> (c as u32) & 1 == 1
    }

    /// Smallest member.
    pub fn min_char(self) -> Option<char> {
        self.is_sat().then(|| char::from(self.0.trailing_zeros() as u8))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        !self.is_sat()
    }
}

impl fmt::Debug for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Pred::TOP {
            return f.write_str(".");
        }
        if *self == Pred::BOT {
            return f.write_str("[]");
        }
        if *self == Pred::digit() {
            return f.write_str("\\d");
        }
        if self.len() == 1 {
            let c = self.min_char().unwrap();
            return if c.is_ascii_alphanumeric() {
                write!(f, "{c}")
            } else {
                write!(f, "\\x{:02x}", c as u32)
            };
        }
        // runs of consecutive members
        f.write_str("[")?;
        let mut b = 0u32;
        while b < 128 {
            if self.0 >> b & 1 == 0 {
                b += 1;
                continue;
            }
            let start = b;
            while b < 128 && self.0 >> b & 1 == 1 {
                b += 1;
            }
            let show = |c: u32| {
                let ch = char::from(c as u8);
                if ch.is_ascii_alphanumeric() {
                    ch.to_string()
                } else {
                    format!("\\x{c:02x}")
                }
            };
            if b - 1 == start {
                f.write_str(&show(start))?;
            } else {
                write!(f, "{}-{}", show(start), show(b - 1))?;
            }
        }
        f.write_str("]")
    }
}

impl Not for Pred {
    type Output = Pred;

    fn not(self) -> Pred {
        Pred(!self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_laws() {
        let d = Pred::digit();
        let az = Pred::range('a', 'z');
        assert!(d.and(az).is_empty());
        assert_eq!(d.or(!d), Pred::TOP);
        assert_eq!(!!d, d);
        assert_eq!(d.len(), 10);
        assert_eq!(az.min_char(), Some('a'));
        assert_eq!(Pred::range(char::from(0), char::from(127)), Pred::TOP);
        assert!(Pred::range('z', 'a').is_empty());
    }

    #[test]
    fn display() {
        assert_eq!(Pred::digit().to_string(), "\\d");
        assert_eq!(Pred::range('a', 'c').or(Pred::char('x').unwrap()).to_string(), "[a-cx]");
    }
}

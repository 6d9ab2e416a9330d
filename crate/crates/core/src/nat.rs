//! Natural numbers under the Cantor pairing `pair(x, y) = (x+y)(x+y+1)/2 + y`.
//!
//! Codes built by nesting pairs grow doubly exponentially, so a [`Nat`] is
//! kept in one of two canonical shapes: a machine word when the value is
//! below [`SMALL_LIMIT`], otherwise the pair of its (canonical) components.
//! Because pairing is a bijection, structural equality of canonical values
//! coincides with numeric equality, and `succ`/`pred`/`unpair` never need to
//! materialize the decimal value.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Values strictly below this bound are stored inline.
pub const SMALL_LIMIT: u64 = 1 << 62;

#[derive(Clone)]
pub struct Nat(Repr);

#[derive(Clone)]
enum Repr {
    Small(u64),
    Pair(Arc<PairNode>),
}

struct PairNode {
    left: Nat,
    right: Nat,
    digest: u64,
}

impl Drop for PairNode {
    // deep codes would otherwise be freed by unbounded recursion
    fn drop(&mut self) {
        let mut pending = vec![
            std::mem::replace(&mut self.left, Nat::zero()),
            std::mem::replace(&mut self.right, Nat::zero()),
        ];
        while let Some(Nat(repr)) = pending.pop() {
            if let Repr::Pair(node) = repr {
                if let Ok(mut node) = Arc::try_unwrap(node) {
                    pending.push(std::mem::replace(&mut node.left, Nat::zero()));
                    pending.push(std::mem::replace(&mut node.right, Nat::zero()));
                }
            }
        }
    }
}

fn mix(a: u64, b: u64) -> u64 {
    // splitmix-style finalizer over the two child digests
    let mut z = a
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .rotate_left(17)
        ^ b.wrapping_add(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn small_pair(x: u64, y: u64) -> Option<u64> {
    let d = (x as u128) + (y as u128);
    let v = d * (d + 1) / 2 + y as u128;
    if v < SMALL_LIMIT as u128 {
        Some(v as u64)
    } else {
        None
    }
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn small_unpair(n: u64) -> (u64, u64) {
    let n = n as u128;
    let d = (isqrt(8 * n + 1) - 1) / 2;
    let y = n - d * (d + 1) / 2;
    ((d - y) as u64, y as u64)
}

impl Nat {
    pub const fn zero() -> Nat {
        Nat(Repr::Small(0))
    }

    pub fn small(n: u64) -> Nat {
        assert!(n < SMALL_LIMIT, "inline naturals must stay below 2^62");
        Nat(Repr::Small(n))
    }

    /// Cantor pairing.
    pub fn pair(x: &Nat, y: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&x.0, &y.0) {
            if let Some(v) = small_pair(*a, *b) {
                return Nat(Repr::Small(v));
            }
        }
        let digest = mix(x.digest(), y.digest());
        Nat(Repr::Pair(Arc::new(PairNode {
            left: x.clone(),
            right: y.clone(),
            digest,
        })))
    }

    /// Inverse of [`Nat::pair`].
    pub fn unpair(&self) -> (Nat, Nat) {
        match &self.0 {
            Repr::Small(n) => {
                let (x, y) = small_unpair(*n);
                (Nat(Repr::Small(x)), Nat(Repr::Small(y)))
            }
            Repr::Pair(node) => (node.left.clone(), node.right.clone()),
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self.0 {
            Repr::Small(n) => Some(n),
            Repr::Pair(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn succ(&self) -> Nat {
        let mut budget = u64::MAX;
        self.succ_bounded(&mut budget).expect("unbounded")
    }

    /// Cut-off predecessor: `pred(0) = 0`.
    pub fn pred(&self) -> Nat {
        let mut budget = u64::MAX;
        self.pred_bounded(&mut budget).expect("unbounded")
    }

    /// `self + 1`, paying one unit of `budget` per pair node rebuilt.
    ///
    /// On a pair node both Cantor components change, so the work doubles
    /// with every level of nesting; `None` once the budget runs out.
    pub fn succ_bounded(&self, budget: &mut u64) -> Option<Nat> {
        match &self.0 {
            Repr::Small(n) if n + 1 < SMALL_LIMIT => Some(Nat(Repr::Small(n + 1))),
            _ => {
                *budget = budget.checked_sub(1)?;
                // walk the diagonal: (x, y) -> (x-1, y+1), or (0, d) -> (d+1, 0)
                let (x, y) = self.unpair();
                if x.is_zero() {
                    Some(Nat::pair(&y.succ_bounded(budget)?, &Nat::zero()))
                } else {
                    Some(Nat::pair(&x.pred_bounded(budget)?, &y.succ_bounded(budget)?))
                }
            }
        }
    }

    /// Cut-off predecessor with the cost model of [`Nat::succ_bounded`].
    pub fn pred_bounded(&self, budget: &mut u64) -> Option<Nat> {
        match &self.0 {
            Repr::Small(n) => Some(Nat(Repr::Small(n.saturating_sub(1)))),
            Repr::Pair(_) => {
                *budget = budget.checked_sub(1)?;
                let (x, y) = self.unpair();
                if y.is_zero() {
                    // (d, 0) is the head of diagonal d; its predecessor ends diagonal d-1
                    Some(Nat::pair(&Nat::zero(), &x.pred_bounded(budget)?))
                } else {
                    Some(Nat::pair(&x.succ_bounded(budget)?, &y.pred_bounded(budget)?))
                }
            }
        }
    }

    fn digest(&self) -> u64 {
        match &self.0 {
            Repr::Small(n) => mix(*n, 0x5151),
            Repr::Pair(node) => node.digest,
        }
    }

    /// Decimal value, if it fits in 128 bits.
    pub fn to_u128(&self) -> Option<u128> {
        match &self.0 {
            Repr::Small(n) => Some(*n as u128),
            Repr::Pair(node) => {
                let x = node.left.to_u128()?;
                let y = node.right.to_u128()?;
                let d = x.checked_add(y)?;
                d.checked_mul(d.checked_add(1)?)?
                    .checked_div(2)?
                    .checked_add(y)
            }
        }
    }

    /// Sequence coding `<x1..xk> = pair(k, pair(x1, pair(x2, ... pair(xk, 0))))`.
    pub fn encode_seq(items: &[Nat]) -> Nat {
        let body = items
            .iter()
            .rev()
            .fold(Nat::zero(), |acc, x| Nat::pair(x, &acc));
        Nat::pair(&Nat::small(items.len() as u64), &body)
    }

    /// Inverse of [`Nat::encode_seq`]. `None` when the length component is
    /// not a small number or exceeds `max_len`.
    pub fn decode_seq(&self, max_len: usize) -> Option<Vec<Nat>> {
        let (len, mut body) = self.unpair();
        let len = len.as_u64()? as usize;
        if len > max_len {
            return None;
        }
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let (head, tail) = body.unpair();
            out.push(head);
            body = tail;
        }
        Some(out)
    }
}

impl From<u64> for Nat {
    fn from(n: u64) -> Nat {
        Nat::small(n)
    }
}

impl PartialEq for Nat {
    fn eq(&self, other: &Nat) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Pair(a), Repr::Pair(b)) => {
                Arc::ptr_eq(a, b)
                    || (a.digest == b.digest && a.left == b.left && a.right == b.right)
            }
            _ => false,
        }
    }
}

impl Eq for Nat {}

impl Hash for Nat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.digest());
    }
}

impl fmt::Display for Nat {
    /// Small values print in decimal; larger ones as `#(x,y)` over their
    /// Cantor components, which the term parser reads back.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n) => write!(f, "{n}"),
            Repr::Pair(_) => {
                f.write_str("#")?;
                self.fmt_components(f)
            }
        }
    }
}

impl Nat {
    fn fmt_components(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n) => write!(f, "{n}"),
            Repr::Pair(node) => {
                f.write_str("(")?;
                node.left.fmt_components(f)?;
                f.write_str(",")?;
                node.right.fmt_components(f)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(depth: u32) -> Nat {
        (0..depth).fold(Nat::small(7), |acc, i| Nat::pair(&acc, &Nat::small(i as u64)))
    }

    #[test]
    fn pairing_formula_values() {
        assert_eq!(Nat::pair(&0.into(), &0.into()), Nat::small(0));
        assert_eq!(Nat::pair(&2.into(), &0.into()), Nat::small(3));
        assert_eq!(Nat::pair(&1.into(), &9.into()), Nat::small(64));
        assert_eq!(Nat::pair(&5.into(), &0.into()), Nat::small(15));
        assert_eq!(Nat::small(4).unpair(), (Nat::small(1), Nat::small(1)));
    }

    #[test]
    fn sequence_coding_of_successor_index() {
        let e = Nat::encode_seq(&[1.into(), 1.into()]);
        assert_eq!(e, Nat::small(25));
        assert_eq!(e.decode_seq(8).unwrap(), vec![Nat::small(1), Nat::small(1)]);
    }

    #[test]
    fn large_values_switch_to_pair_form() {
        let n = big(12);
        assert!(n.as_u64().is_none());
        let (l, r) = n.unpair();
        assert_eq!(Nat::pair(&l, &r), n);
        assert_eq!(n.succ().pred(), n);
        assert_ne!(n.succ(), n);
    }

    #[test]
    fn succ_crosses_the_inline_boundary() {
        let top = Nat::small(SMALL_LIMIT - 1);
        let next = top.succ();
        assert!(next.as_u64().is_none());
        assert_eq!(next.to_u128(), Some(SMALL_LIMIT as u128));
        assert_eq!(next.pred(), top);
    }

    proptest! {
        #[test]
        fn unpair_inverts_pair(x in 0u64..=65536, y in 0u64..=65536) {
            let n = Nat::pair(&x.into(), &y.into());
            let d = (x + y) as u128;
            prop_assert_eq!(n.to_u128(), Some(d * (d + 1) / 2 + y as u128));
            prop_assert_eq!(n.unpair(), (Nat::small(x), Nat::small(y)));
        }

        #[test]
        fn structural_succ_matches_arithmetic(x in 0u64..1 << 20, y in 0u64..1 << 20) {
            // force the pair representation and compare against u128 arithmetic
            let n = Nat::pair(&Nat::pair(&x.into(), &y.into()), &Nat::small(x ^ y));
            if let Some(v) = n.to_u128() {
                prop_assert_eq!(n.succ().to_u128(), Some(v + 1));
                prop_assert_eq!(n.pred().to_u128(), Some(v.saturating_sub(1)));
            }
        }

        #[test]
        fn seq_round_trip(items in proptest::collection::vec(0u64..1000, 0..8)) {
            let nats: Vec<Nat> = items.iter().map(|&i| Nat::small(i)).collect();
            prop_assert_eq!(Nat::encode_seq(&nats).decode_seq(8), Some(nats));
        }
    }
}

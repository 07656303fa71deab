use super::{Algebra, Elem, Signature, TupleCode};
use crate::config::Limits;
use crate::error::{Error, Result};

/// The direct power `B^n`, elements encoded as tuple codes.
pub struct PowerAlgebra<'a, B: Algebra + ?Sized> {
    base: &'a B,
    n: usize,
    size: usize,
}

impl<'a, B: Algebra + ?Sized> PowerAlgebra<'a, B> {
    pub fn new(base: &'a B, n: usize, limits: &Limits) -> Result<Self> {
        let size = limits.power_size(base.size(), n)?;
        Ok(PowerAlgebra { base, n, size })
    }

    pub fn base(&self) -> &B {
        self.base
    }

    pub fn power(&self) -> usize {
        self.n
    }

    pub fn encode(&self, tuple: &[Elem]) -> Elem {
        TupleCode::encode(tuple, self.base.size()) as Elem
    }

    pub fn decode(&self, code: Elem) -> Vec<Elem> {
        TupleCode::decode(code as usize, self.base.size(), self.n)
    }

    /// The constant tuple `(x, .., x)`.
    pub fn diagonal(&self, x: Elem) -> Elem {
        self.encode(&vec![x; self.n])
    }

    pub fn coord(&self, code: Elem, i: usize) -> Elem {
        TupleCode::coord(code as usize, self.base.size(), i)
    }
}

impl<B: Algebra + ?Sized> Algebra for PowerAlgebra<'_, B> {
    fn size(&self) -> usize {
        self.size
    }

    fn signature(&self) -> &Signature {
        self.base.signature()
    }

    fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let s = self.base.size();
        let mut out = 0usize;
        let mut mul = 1usize;
        let mut rest: Vec<usize> = args.iter().map(|&a| a as usize).collect();
        let mut coords = vec![0 as Elem; args.len()];
        for _ in 0..self.n {
            for (c, r) in coords.iter_mut().zip(rest.iter_mut()) {
                *c = (*r % s) as Elem;
                *r /= s;
            }
            out += self.base.apply(op, &coords) as usize * mul;
            mul *= s;
        }
        out as Elem
    }
}

/// A subuniverse viewed as an algebra in its own right, relabelled
/// `0..len` in the order of `elems`.
pub struct SubAlgebraView<'a, P: Algebra + ?Sized> {
    parent: &'a P,
    elems: Vec<Elem>,
    index: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl<'a, P: Algebra + ?Sized> SubAlgebraView<'a, P> {
    /// `elems` must be closed under the operations of `parent`.
    pub fn new(parent: &'a P, elems: &[Elem]) -> Self {
        let mut index = vec![ABSENT; parent.size()];
        for (i, &e) in elems.iter().enumerate() {
            index[e as usize] = i as u32;
        }
        SubAlgebraView {
            parent,
            elems: elems.to_vec(),
            index,
        }
    }

    pub fn new_checked(parent: &'a P, elems: &[Elem]) -> Result<Self> {
        let view = SubAlgebraView::new(parent, elems);
        if (elems.len() as u128).pow(max_arity(parent.signature()) as u32) <= 1 << 22 {
            let mut args = Vec::new();
            for op in 0..parent.signature().len() {
                let ar = parent.signature().arity(op);
                let count = elems.len().pow(ar as u32);
                args.resize(ar, 0);
                for code in 0..count {
                    TupleCode::decode_into(code, elems.len(), &mut args);
                    let parent_args: Vec<Elem> = args.iter().map(|&a| elems[a as usize]).collect();
                    let v = parent.apply(op, &parent_args);
                    if view.index[v as usize] == ABSENT {
                        return Err(Error::Precondition(format!(
                            "set is not closed under `{}`",
                            parent.signature().0[op].name
                        )));
                    }
                }
            }
        }
        Ok(view)
    }

    pub fn to_parent(&self, local: Elem) -> Elem {
        self.elems[local as usize]
    }

    pub fn to_local(&self, parent_elem: Elem) -> Option<Elem> {
        match self.index.get(parent_elem as usize) {
            Some(&i) if i != ABSENT => Some(i),
            _ => None,
        }
    }

    pub fn parent_elements(&self) -> &[Elem] {
        &self.elems
    }
}

impl<P: Algebra + ?Sized> Algebra for SubAlgebraView<'_, P> {
    fn size(&self) -> usize {
        self.elems.len()
    }

    fn signature(&self) -> &Signature {
        self.parent.signature()
    }

    fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let mut buf = [0 as Elem; 8];
        let v = if args.len() <= buf.len() {
            for (b, &a) in buf.iter_mut().zip(args) {
                *b = self.elems[a as usize];
            }
            self.parent.apply(op, &buf[..args.len()])
        } else {
            let parent_args: Vec<Elem> = args.iter().map(|&a| self.elems[a as usize]).collect();
            self.parent.apply(op, &parent_args)
        };
        let local = self.index[v as usize];
        debug_assert_ne!(local, ABSENT, "subalgebra view is not closed");
        local
    }
}

pub(crate) fn max_arity(sig: &Signature) -> usize {
    sig.iter().map(|s| s.arity).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;

    #[test]
    fn power_applies_coordinatewise() {
        let z4 = builtin::cyclic_group(4);
        let p = PowerAlgebra::new(&z4, 2, &Limits::default()).unwrap();
        assert_eq!(p.size(), 16);
        let a = p.encode(&[1, 3]);
        let b = p.encode(&[2, 2]);
        let add = z4.signature().index_of("add").unwrap();
        assert_eq!(p.decode(p.apply(add, &[a, b])), vec![3, 1]);
    }

    #[test]
    fn power_limit_is_enforced() {
        let z4 = builtin::cyclic_group(4);
        let err = PowerAlgebra::new(&z4, 7, &Limits::default()).err().unwrap();
        assert!(matches!(err, Error::LimitExceeded { .. }));
    }

    #[test]
    fn checked_view_rejects_unclosed_sets() {
        let z4 = builtin::cyclic_group(4);
        assert!(SubAlgebraView::new_checked(&z4, &[0, 1]).is_err());
        let v = SubAlgebraView::new_checked(&z4, &[0, 2]).unwrap();
        let add = z4.signature().index_of("add").unwrap();
        assert_eq!(v.apply(add, &[1, 1]), 0);
    }
}

use super::Elem;

/// Encoding of tuples `(x_1, .., x_n)` over a carrier of size `s` as the
/// integer `sum x_i * s^(i-1)`; the first coordinate is least significant.
pub struct TupleCode;

impl TupleCode {
    pub fn encode(tuple: &[Elem], size: usize) -> usize {
        let mut code = 0usize;
        for &x in tuple.iter().rev() {
            code = code * size + x as usize;
        }
        code
    }

    pub fn decode(code: usize, size: usize, arity: usize) -> Vec<Elem> {
        let mut out = vec![0; arity];
        Self::decode_into(code, size, &mut out);
        out
    }

    pub fn decode_into(mut code: usize, size: usize, out: &mut [Elem]) {
        for slot in out.iter_mut() {
            *slot = (code % size) as Elem;
            code /= size;
        }
    }

    /// Coordinate `i` (0-based) of an encoded tuple.
    #[inline]
    pub fn coord(code: usize, size: usize, i: usize) -> Elem {
        ((code / size.pow(i as u32)) % size) as Elem
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_coordinate_least_significant() {
        assert_eq!(TupleCode::encode(&[1, 0], 4), 1);
        assert_eq!(TupleCode::encode(&[0, 1], 4), 4);
        assert_eq!(TupleCode::encode(&[3, 2, 1], 4), 3 + 2 * 4 + 16);
        assert_eq!(TupleCode::coord(27, 4, 1), 2);
    }

    proptest! {
        #[test]
        fn round_trip(size in 1usize..9, tuple in proptest::collection::vec(0u32..9, 0..5)) {
            let tuple: Vec<Elem> = tuple.into_iter().map(|x| x % size as u32).collect();
            let code = TupleCode::encode(&tuple, size);
            prop_assert!(code < size.pow(tuple.len() as u32).max(1));
            prop_assert_eq!(TupleCode::decode(code, size, tuple.len()), tuple);
        }
    }
}

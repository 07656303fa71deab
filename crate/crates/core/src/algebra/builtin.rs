//! Named algebras built programmatically, so tests and the CLI need no fixtures.

use super::{Elem, FiniteAlgebra};

/// `Z_n` as a group in the signature `add/2, neg/1, zero/0`.
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    abelian_group(&[n]).with_name(format!("Z{n}"))
}

/// `Z_{n_1} x .. x Z_{n_k}`, first factor least significant in the element code.
pub fn abelian_group(orders: &[usize]) -> FiniteAlgebra {
    assert!(
        orders.iter().all(|&n| n >= 1),
        "factor orders must be positive"
    );
    let size: usize = orders.iter().product();
    let split = move |x: Elem| -> Vec<usize> {
        let mut x = x as usize;
        orders
            .iter()
            .map(|&n| {
                let c = x % n;
                x /= n;
                c
            })
            .collect()
    };
    let join = move |cs: Vec<usize>| -> Elem {
        let mut code = 0;
        for (c, &n) in cs.iter().zip(orders).rev() {
            code = code * n + c;
        }
        code as Elem
    };
    let name = orders
        .iter()
        .map(|n| format!("Z{n}"))
        .collect::<Vec<_>>()
        .join("x");
    FiniteAlgebra::from_fns(
        name,
        size,
        vec![
            (
                "add",
                2,
                Box::new(move |a: &[Elem]| {
                    let (x, y) = (split(a[0]), split(a[1]));
                    join(
                        x.iter()
                            .zip(&y)
                            .zip(orders)
                            .map(|((p, q), n)| (p + q) % n)
                            .collect(),
                    )
                }),
            ),
            (
                "neg",
                1,
                Box::new(move |a: &[Elem]| {
                    join(
                        split(a[0])
                            .iter()
                            .zip(orders)
                            .map(|(p, n)| (n - p) % n)
                            .collect(),
                    )
                }),
            ),
            ("zero", 0, Box::new(|_: &[Elem]| 0)),
        ],
    )
    .expect("group tables are valid")
}

pub fn z2xz2() -> FiniteAlgebra {
    abelian_group(&[2, 2])
}

pub fn z2xz4() -> FiniteAlgebra {
    abelian_group(&[2, 4])
}

/// The ring `F_2[x,y]/(x^2, y^2, xy)` as a module over itself: element
/// `a + bx + cy` is coded `a + 2b + 4c`; scalars enter as `mul_x`, `mul_y`.
pub fn sec6() -> FiniteAlgebra {
    FiniteAlgebra::from_fns(
        "F2[x,y]/(x2,y2,xy)",
        8,
        vec![
            ("add", 2, Box::new(|a: &[Elem]| a[0] ^ a[1])),
            ("neg", 1, Box::new(|a: &[Elem]| a[0])),
            ("zero", 0, Box::new(|_: &[Elem]| 0)),
            ("mul_x", 1, Box::new(|a: &[Elem]| (a[0] & 1) << 1)),
            ("mul_y", 1, Box::new(|a: &[Elem]| (a[0] & 1) << 2)),
        ],
    )
    .expect("module tables are valid")
}

/// The two-element meet semilattice.
pub fn semilattice() -> FiniteAlgebra {
    FiniteAlgebra::from_fns(
        "semilattice",
        2,
        vec![("meet", 2, Box::new(|a: &[Elem]| a[0] & a[1]))],
    )
    .expect("semilattice table is valid")
}

/// `Z_n` with only the ternary operation `x - y + z`: an affine space without constants.
pub fn affine_space(n: usize) -> FiniteAlgebra {
    let m = n as Elem;
    FiniteAlgebra::from_fns(
        format!("aff{n}"),
        n,
        vec![(
            "t",
            3,
            Box::new(move |a: &[Elem]| (a[0] + m - a[1] + a[2]) % m),
        )],
    )
    .expect("affine table is valid")
}

/// `Z_4` with an extra unary operation `x + 1`.
pub fn z4_shift() -> FiniteAlgebra {
    cyclic_group(4)
        .with_operation(super::Operation {
            name: "succ".into(),
            arity: 1,
            table: vec![1, 2, 3, 0],
        })
        .expect("shift table is valid")
        .with_name("Z4+succ")
}

/// Builtin names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "z<n>",
    "z2xz2",
    "z2xz4",
    "sec6",
    "semilattice",
    "aff<n>",
    "z4shift",
];

pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    let parse = |prefix: &str| {
        name.strip_prefix(prefix)
            .and_then(|r| r.parse::<usize>().ok())
            .filter(|&n| (1..=4096).contains(&n))
    };
    match name {
        "z2xz2" => Some(z2xz2()),
        "z2xz4" => Some(z2xz4()),
        "sec6" => Some(sec6()),
        "semilattice" => Some(semilattice()),
        "z4shift" => Some(z4_shift()),
        _ => {
            if let Some(n) = parse("aff") {
                Some(affine_space(n))
            } else {
                parse("z").map(cyclic_group)
            }
        }
    }
}

/// The default battery: `Z2, Z3, Z4, Z2^2, Z6, Z2xZ4, Z8` and the eight-element module.
pub fn default_suite() -> Vec<FiniteAlgebra> {
    vec![
        cyclic_group(2),
        cyclic_group(3),
        cyclic_group(4),
        z2xz2(),
        cyclic_group(6),
        z2xz4(),
        cyclic_group(8),
        sec6(),
    ]
}

/// Decodes an element of [`abelian_group`] into its components.
pub fn components(orders: &[usize], x: Elem) -> Vec<Elem> {
    let mut x = x as usize;
    orders
        .iter()
        .map(|&n| {
            let c = x % n;
            x /= n;
            c as Elem
        })
        .collect()
}

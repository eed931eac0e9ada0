//! Worked-example algebras used across the unit tests, built directly from
//! their tables so tests do not depend on the document parser.

use crate::algebra::{FiniteAlgebra, Operation};

fn build(name: &str, elements: &str, ops: &[(&str, usize, &str)]) -> FiniteAlgebra {
    let els: Vec<String> = elements.split_whitespace().map(String::from).collect();
    let n = els.len();
    let idx = |nm: &str| {
        els.iter()
            .position(|e| e == nm)
            .unwrap_or_else(|| panic!("unknown element '{nm}' in {name}"))
    };
    let operations = ops
        .iter()
        .map(|(nm, ar, cells)| {
            let table: Vec<usize> = cells.split_whitespace().map(idx).collect();
            Operation::new(*nm, *ar, n, table).unwrap()
        })
        .collect();
    FiniteAlgebra::new(name, els, operations).unwrap()
}

pub fn a1() -> FiniteAlgebra {
    build(
        "A1",
        "a b c d e f",
        &[
            (
                "meet",
                2,
                "a a e e e e
                 a b e f e f
                 e e c c e e
                 e f c d e f
                 e e e e e e
                 e f e f e f",
            ),
            (
                "join",
                2,
                "a b e f e f
                 b b f f f f
                 e f c d e f
                 f f d d f f
                 e f e f e f
                 f f f f f f",
            ),
            ("not", 1, "b a d c f e"),
        ],
    )
}

pub fn a2() -> FiniteAlgebra {
    build(
        "A2",
        "a b c d e f",
        &[
            (
                "meet",
                2,
                "a a c c e e
                 a b c d e f
                 c c c c e e
                 c d c d e f
                 e e e e e e
                 e f e f e f",
            ),
            (
                "join",
                2,
                "a b c d e f
                 b b d d f f
                 c d c d e f
                 d d d d f f
                 e f e f e f
                 f f f f f f",
            ),
            ("not", 1, "b a d c f e"),
        ],
    )
}

pub fn a3() -> FiniteAlgebra {
    build(
        "A3",
        "a b c d",
        &[
            (
                "meet",
                2,
                "a a c c
                 a b c c
                 c c c c
                 c c c d",
            ),
            (
                "join",
                2,
                "a b c d
                 b b c d
                 c c c d
                 d d d d",
            ),
            ("not", 1, "b a d c"),
        ],
    )
}

pub fn a4() -> FiniteAlgebra {
    build(
        "A4",
        "a b c d",
        &[(
            "star",
            2,
            "a b c d
             b b c d
             c c d c
             d d d c",
        )],
    )
}

pub fn a5() -> FiniteAlgebra {
    build(
        "A5",
        "a b c d",
        &[(
            "star",
            2,
            "a c b a
             c b c c
             b b c b
             a c b d",
        )],
    )
}

pub fn a6() -> FiniteAlgebra {
    build(
        "A6",
        "a b c d e f",
        &[(
            "star",
            2,
            "a a c c e e
             a a c c e e
             c c c c e e
             c c c c e e
             e e e e e e
             e e e e e e",
        )],
    )
}

pub fn a7() -> FiniteAlgebra {
    build(
        "A7",
        "a1 a2 a3 a4 a5 a6 a7 a8 a9 a10 a11",
        &[(
            "star",
            2,
            "a2 a1 a6 a5 a6 a5 a8 a7 a9 a11 a10
             a2 a1 a6 a5 a6 a5 a8 a7 a9 a11 a10
             a6 a5 a4 a3 a6 a5 a8 a7 a9 a11 a10
             a6 a5 a4 a3 a6 a5 a8 a7 a9 a11 a10
             a6 a5 a6 a5 a6 a5 a8 a7 a9 a11 a10
             a6 a5 a6 a5 a6 a5 a8 a7 a9 a11 a10
             a8 a7 a8 a7 a8 a7 a8 a7 a10 a11 a10
             a8 a7 a8 a7 a8 a7 a8 a7 a10 a11 a10
             a9 a9 a9 a9 a9 a9 a10 a11 a9 a11 a10
             a10 a11 a10 a11 a10 a11 a10 a11 a10 a11 a10
             a10 a11 a10 a11 a10 a11 a10 a11 a10 a11 a10",
        )],
    )
}

pub fn a8() -> FiniteAlgebra {
    build(
        "A8",
        "a1 a2 a3 a4 a5 a6 a7 a8 a9 a10",
        &[(
            "star",
            2,
            "a1 a3 a3 a3 a6 a6 a8 a8 a9 a9
             a3 a2 a3 a3 a6 a6 a8 a8 a9 a9
             a3 a3 a4 a3 a5 a5 a7 a7 a10 a10
             a3 a3 a3 a3 a5 a5 a7 a7 a10 a10
             a6 a6 a5 a5 a5 a5 a9 a9 a9 a9
             a6 a6 a5 a5 a5 a5 a9 a9 a9 a9
             a8 a8 a7 a7 a9 a9 a7 a7 a9 a9
             a8 a8 a7 a7 a9 a9 a7 a7 a9 a9
             a9 a9 a9 a9 a9 a9 a9 a9 a10 a9
             a9 a9 a9 a9 a9 a9 a9 a9 a9 a9",
        )],
    )
}

pub fn all() -> Vec<FiniteAlgebra> {
    vec![a1(), a2(), a3(), a4(), a5(), a6(), a7(), a8()]
}

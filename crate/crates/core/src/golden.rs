//! Reference 9×9 matrices for d = 3 with their scalar prefactors factored
//! out. Entries are written in dot notation (`.` is zero); the token `s`
//! stands for √3 − 1.

use crate::linalg::{BipartiteOperator, ComplexMatrix};

#[derive(Debug, Clone, Copy)]
pub struct GoldenMatrix {
    pub name: &'static str,
    /// Prefactor label, e.g. "6(2+√3)".
    pub prefactor_label: &'static str,
    pub prefactor: fn() -> f64,
    pub body: &'static str,
}

impl GoldenMatrix {
    /// Entries without the prefactor.
    pub fn body_matrix(&self) -> ComplexMatrix {
        parse_body(self.body)
    }

    /// Full operator, prefactor applied.
    pub fn operator(&self) -> BipartiteOperator {
        BipartiteOperator::new(self.body_matrix().scale((self.prefactor)()), 3)
            .expect("golden matrices are 9x9")
    }

    /// ‖M/prefactor − body‖_max for a computed matrix M.
    pub fn deviation(&self, computed: &ComplexMatrix) -> f64 {
        computed
            .scale(1.0 / (self.prefactor)())
            .max_abs_diff(&self.body_matrix())
    }
}

fn parse_body(body: &str) -> ComplexMatrix {
    let rows: Vec<Vec<f64>> = body
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split_whitespace()
                .filter(|t| *t != "|")
                .map(|t| match t {
                    "." => 0.0,
                    "s" => 3f64.sqrt() - 1.0,
                    other => other.parse().expect("golden entry"),
                })
                .collect()
        })
        .collect();
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "golden body must be square");
    ComplexMatrix::from_real_fn(n, n, |i, j| rows[i][j])
}

fn six_two_plus_root3() -> f64 {
    6.0 * (2.0 + 3f64.sqrt())
}

fn two_two_plus_root3() -> f64 {
    2.0 * (2.0 + 3f64.sqrt())
}

fn one_over_24() -> f64 {
    1.0 / 24.0
}

fn one_over_3_3_plus_root3() -> f64 {
    1.0 / (3.0 * (3.0 + 3f64.sqrt()))
}

/// Gell-Mann basis, N = L = 4, last rotation S₁.
pub const SHIFT1_GELLMANN: GoldenMatrix = GoldenMatrix {
    name: "W~1 (Gell-Mann, O4 = S1)",
    prefactor_label: "6(2+√3)",
    prefactor: six_two_plus_root3,
    body: "
         1  .  .   .  -1  .   .  .  -1
         .  .  .   .  .   .   .  .  .
         .  .  1   .  .   .   .  .  .
         .  .  .   1  .   .   .  .  .
        -1  .  .   .  1   .   .  .  -1
         .  .  .   .  .   .   .  .  .
         .  .  .   .  .   .   .  .  .
         .  .  .   .  .   .   .  1  .
        -1  .  .   .  -1  .   .  .  1
    ",
};

/// Gell-Mann basis, N = L = 4, last rotation S₂.
pub const SHIFT2_GELLMANN: GoldenMatrix = GoldenMatrix {
    name: "W~2 (Gell-Mann, O4 = S2)",
    prefactor_label: "6(2+√3)",
    prefactor: six_two_plus_root3,
    body: "
         1  .  .   .  -1  .   .  .  -1
         .  1  .   .  .   .   .  .  .
         .  .  .   .  .   .   .  .  .
         .  .  .   .  .   .   .  .  .
        -1  .  .   .  1   .   .  .  -1
         .  .  .   .  .   1   .  .  .
         .  .  .   .  .   .   1  .  .
         .  .  .   .  .   .   .  .  .
        -1  .  .   .  -1  .   .  .  1
    ",
};

/// Indecomposable MUB witness, N = 4, L = 2, no rotations.
pub const MUB_INDECOMPOSABLE_1: GoldenMatrix = GoldenMatrix {
    name: "W~1 (MUB, L = 2)",
    prefactor_label: "2(2+√3)",
    prefactor: two_two_plus_root3,
    body: "
         .  .  .   .  1  .   .  .  1
         .  3  .   .  .  -2  -2 .  .
         .  .  3   -2 .  .   .  -2 .
         .  .  -2  3  .  .   .  -2 .
         1  .  .   .  .  .   .  .  1
         .  -2 .   .  .  3   -2 .  .
         .  -2 .   .  .  -2  3  .  .
         .  .  -2  -2 .  .   .  3  .
         1  .  .   .  1  .   .  .  .
    ",
};

/// Indecomposable MUB witness, N = 4, L = 2, no rotations.
pub const MUB_INDECOMPOSABLE_2: GoldenMatrix = GoldenMatrix {
    name: "W~2 (MUB, L = 2)",
    prefactor_label: "2(2+√3)",
    prefactor: two_two_plus_root3,
    body: "
         4  .  .   .  -1 .   .  .  -1
         .  1  .   .  .  2   2  .  .
         .  .  1   2  .  .   .  2  .
         .  .  2   1  .  .   .  2  .
        -1  .  .   .  4  .   .  .  -1
         .  2  .   .  .  1   2  .  .
         .  2  .   .  .  2   1  .  .
         .  .  2   2  .  .   .  1  .
        -1  .  .   .  -1 .   .  .  4
    ",
};

/// PPT state detected by [`MUB_INDECOMPOSABLE_1`].
pub const PPT_STATE_1: GoldenMatrix = GoldenMatrix {
    name: "rho1",
    prefactor_label: "1/24",
    prefactor: one_over_24,
    body: "
         4  .  .   .  1  .   .  .  1
         .  2  .   .  .  2   2  .  .
         .  .  2   2  .  .   .  2  .
         .  .  2   2  .  .   .  2  .
         1  .  .   .  4  .   .  .  1
         .  2  .   .  .  2   2  .  .
         .  2  .   .  .  2   2  .  .
         .  .  2   2  .  .   .  2  .
         1  .  .   .  1  .   .  .  4
    ",
};

/// PPT state detected by [`MUB_INDECOMPOSABLE_2`].
pub const PPT_STATE_2: GoldenMatrix = GoldenMatrix {
    name: "rho2",
    prefactor_label: "1/(3(3+√3))",
    prefactor: one_over_3_3_plus_root3,
    body: "
         s  .  .   .  s  .   .  .  s
         .  2  .   .  .  -1  -1 .  .
         .  .  2   -1 .  .   .  -1 .
         .  .  -1  2  .  .   .  -1 .
         s  .  .   .  s  .   .  .  s
         .  -1 .   .  .  2   -1 .  .
         .  -1 .   .  .  -1  2  .  .
         .  .  -1  -1 .  .   .  2  .
         s  .  .   .  s  .   .  .  s
    ",
};

/// Decomposable Gell-Mann witness, N = 4, L = 2, no rotations.
pub const GELLMANN_DECOMPOSABLE_3: GoldenMatrix = GoldenMatrix {
    name: "W~3 (Gell-Mann, L = 2)",
    prefactor_label: "6(2+√3)",
    prefactor: six_two_plus_root3,
    body: "
         .  .  .   .  .  .   .  .  1
         .  1  .   -1 .  .   .  .  .
         .  .  1   .  .  .   .  .  .
         .  -1 .   1  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  1   .  1  .
         .  .  .   .  .  .   1  .  .
         .  .  .   .  .  1   .  1  .
         1  .  .   .  .  .   .  .  .
    ",
};

pub const GELLMANN_DECOMPOSABLE_4: GoldenMatrix = GoldenMatrix {
    name: "W~4 (Gell-Mann, L = 2)",
    prefactor_label: "2(2+√3)",
    prefactor: two_two_plus_root3,
    body: "
         4  .  .   .  -3 .   .  .  .
         .  1  .   .  .  .   .  .  .
         .  .  1   .  .  .   3  .  .
         .  .  .   1  .  .   .  .  .
        -3  .  .   .  4  .   .  .  .
         .  .  .   .  .  1   .  3  .
         .  .  3   .  .  .   1  .  .
         .  .  .   .  .  3   .  1  .
         .  .  .   .  .  .   .  .  4
    ",
};

pub const DECOMPOSITION_A3: GoldenMatrix = GoldenMatrix {
    name: "A3",
    prefactor_label: "6(2+√3)",
    prefactor: six_two_plus_root3,
    body: "
         .  .  .   .  .  .   .  .  .
         .  1  .   -1 .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  -1 .   1  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  1   .  1  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  1   .  1  .
         .  .  .   .  .  .   .  .  .
    ",
};

pub const DECOMPOSITION_B3: GoldenMatrix = GoldenMatrix {
    name: "B3",
    prefactor_label: "6(2+√3)",
    prefactor: six_two_plus_root3,
    body: "
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  .  1   .  .  .   1  .  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  .  1   .  .  .   1  .  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
    ",
};

pub const DECOMPOSITION_A4: GoldenMatrix = GoldenMatrix {
    name: "A4",
    prefactor_label: "2(2+√3)",
    prefactor: two_two_plus_root3,
    body: "
         .  .  .   .  .  .   .  .  .
         .  1  .   -1 .  .   .  .  .
         .  .  1   .  .  .   1  .  .
         .  -1 .   1  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  1   .  1  .
         .  .  1   .  .  .   1  .  .
         .  .  .   .  .  1   .  1  .
         .  .  .   .  .  .   .  .  .
    ",
};

pub const DECOMPOSITION_B4: GoldenMatrix = GoldenMatrix {
    name: "B4",
    prefactor_label: "2(2+√3)",
    prefactor: two_two_plus_root3,
    body: "
         4  .  .   .  -2 .   .  .  2
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
        -2  .  .   .  4  .   .  .  2
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         .  .  .   .  .  .   .  .  .
         2  .  .   .  2  .   .  .  4
    ",
};

pub const ALL: [GoldenMatrix; 12] = [
    SHIFT1_GELLMANN,
    SHIFT2_GELLMANN,
    MUB_INDECOMPOSABLE_1,
    MUB_INDECOMPOSABLE_2,
    PPT_STATE_1,
    PPT_STATE_2,
    GELLMANN_DECOMPOSABLE_3,
    GELLMANN_DECOMPOSABLE_4,
    DECOMPOSITION_A3,
    DECOMPOSITION_B3,
    DECOMPOSITION_A4,
    DECOMPOSITION_B4,
];

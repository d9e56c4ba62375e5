#![allow(dead_code)]

use thurston::combinatorics::{enumerate_admissible, EnumerationFilter};
use thurston::Combinatorics;

pub fn c(s: &str) -> Combinatorics {
    Combinatorics::parse(s).unwrap()
}

/// Unobstructed, non-exceptional Table 2 rows: combinatorics, N, mu, kappa,
/// Sigma, Delta.
pub const TABLE2_CONVERGED: [(&str, usize, f64, f64, f64, f64); 27] = [
    (
        "5,6,4,1,0,2,3",
        87,
        -7.2407034,
        1.097305,
        -0.338652,
        0.836756,
    ),
    ("1,2,3,2,0", 63, -1.270048, -1.351520, 0.893946, 0.561904),
    ("3,2,1,2", 43, -1.295581, 1.191483, 0.0, 0.5),
    ("1,2,4,5,2,1,0", 42, -2.594313, -1.637869, 1.0, 0.712071),
    ("3,2,0,1", 14, -3.796781, 0.898403, -0.287930, 0.712070),
    ("3,2,0,1,4", 31, 3.498562, 0.749281, 0.258130, 0.741869),
    ("4,3,0,1,3", 23, -5.538584, 1.769292, -0.182973, 0.817027),
    ("4,3,0,1,3,5", 24, 3.890875, 0.945437, 0.223012, 0.776988),
    ("1,0", 1, -2.0, 0.0, -0.5, 0.5),
    ("1,2,0", 12, -4.649436, -1.324718, -0.772304, 0.772304),
    ("1,2,3,0", 69, -5.968584, -1.984292, -0.833802, 0.833802),
    ("2,3,1,0", 12, -3.796780, -0.898402, -0.712071, 0.712071),
    ("1,2,3,4,0", 90, -6.656438, -2.328219, -0.855761, 0.855761),
    ("2,4,3,1,0", 13, -4.044724, -1.022362, -0.731704, 0.731704),
    ("1,3,4,2,0", 44, -5.628255, -1.814128, -0.820750, 0.820750),
    ("2,3,4,0,1", 88, -18.46037, -1.433732, -0.592613, 0.932596),
    (
        "2,3,4,5,6,0,1",
        100,
        -25.104560,
        -3.261693,
        -0.655923,
        0.952150,
    ),
    ("1,2,1,0", 61, -1.295598, -1.191488, 1.0, 0.5),
    ("1,2,3,1,0", 62, -2.340346, -1.539254, 1.0, 0.682963),
    ("4,5,4,0,1,2", 25, -8.401378, 0.770864, -0.399338, 0.854152),
    (
        "6,7,5,4,1,0,2,3",
        38,
        -5.333358,
        0.972001,
        -0.318689,
        0.784399,
    ),
    ("2,3,2,1,0", 22, -1.333333, -1.0, -0.8929233, 0.455512),
    (
        "3,4,6,5,4,0,1",
        68,
        -6.704389,
        -1.109249,
        -0.673413,
        0.825583,
    ),
    ("2,3,2,0", 2, -4.0, -1.0, -0.728301, 0.728301),
    ("1,3,4,1,0", 23, -5.538584, -1.769292, -0.817021, 0.817021),
    ("1,3,4,3,0", 53, -5.678573, -1.839286, -0.822747, 0.822747),
    ("3,4,6,3,1,0,1", 99, -8.266304, -1.0, -0.632072, 0.853973),
];

/// Strongly obstructed Table 2 rows with the sign of the limiting mu.
pub const TABLE2_STRONG: [(&str, f64); 16] = [
    ("3,5,3,2,0,2", -1.0),
    ("2,0,1,2,5,3", 1.0),
    ("3,5,4,1,0,2", -1.0),
    ("2,4,1,0,1", -1.0),
    ("1,0,1,4,2", 1.0),
    ("2,3,0,1", -1.0),
    ("1,0,3,2", 1.0),
    ("2,4,3,0,1", -1.0),
    ("1,0,3,4,2", 1.0),
    // printed as +inf with Sigma = -1/2; the run gives -inf
    ("3,4,5,1,0,2", 1.0),
    ("4,5,0,1,2,3", -1.0),
    ("2,4,2,0,1", -1.0),
    ("1,0,2,4,2", 1.0),
    ("3,5,4,3,0,2", -1.0),
    ("2,0,3,5,6,5,3", 1.0),
    ("2,0,4,5,6,5,3", 1.0),
];

/// Combinatorics drawn in the appendix figures.
pub const APPENDIX_FIGURES: [&str; 34] = [
    "1,0",
    "1,0,1,4,2",
    "1,0,2,4,2",
    "1,0,3,2",
    "1,0,3,4,2",
    "1,2,0",
    "1,2,1,0",
    "1,2,3,0",
    "1,2,3,1,0",
    "1,2,3,2,0",
    "1,2,3,4,0",
    "1,3,4,1,0",
    "1,3,4,2,0",
    "1,3,4,3,0",
    "2,0,3,5,6,5,3",
    "2,0,4,5,6,5,3",
    "2,3,0,1",
    "2,3,1,0",
    "2,3,2,0",
    "2,3,2,1,0",
    "2,3,4,0,1",
    "2,3,4,5,6,0,1",
    "2,4,1,0,1",
    "2,4,2,0,1",
    "2,4,3,0,1",
    "2,4,3,1,0",
    "3,4,5,1,0,2",
    "3,4,6,3,1,0,1",
    "3,4,6,5,4,0,1",
    "3,5,4,1,0,2",
    "3,5,4,3,0,2",
    "4,5,0,1,2,3",
    "4,5,4,0,1,2",
    "6,7,5,4,1,0,2,3",
];

/// The appendix figures together with every minimal non-polynomial
/// combinatorics with n <= 4, both orientations.
pub fn appendix_a() -> Vec<Combinatorics> {
    let mut set: Vec<Combinatorics> = APPENDIX_FIGURES.iter().map(|s| c(s)).collect();
    let filter = EnumerationFilter {
        minimal: true,
        nonpolynomial: true,
    };
    for n in 1..=4 {
        set.extend(enumerate_admissible(n, filter, 8).unwrap());
    }
    set.sort();
    set.dedup();
    set
}

/// Co-polynomial kneading table: -+ combinatorics, K1 as a fraction, the
/// printed K1, and the c of the corresponding polynomial x^2 - c.
pub const KNEADING_TABLE: [(&str, (i128, i128), f64, f64); 10] = [
    ("4,0,1,2,3", (15, 16), 0.9375, 1.985424253),
    ("3,0,1,2", (7, 8), 0.875, 1.940799807),
    ("4,1,0,1,3", (5, 6), 0.833333, 1.892910988),
    ("4,2,0,1,3", (13, 16), 0.8125, 1.860782522),
    ("4,3,0,1,3", (4, 5), 0.8, 1.839286755),
    ("2,0,1", (3, 4), 0.75, 1.754877666),
    ("4,3,1,0,2", (11, 16), 0.6875, 1.625413725),
    ("3,1,0,1", (2, 3), 0.666667, 1.543689013),
    ("3,2,0,1", (5, 8), 0.625, 1.310702641),
    ("1,0", (1, 2), 0.5, 1.0),
];

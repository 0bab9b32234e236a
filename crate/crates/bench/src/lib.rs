//! Shared inputs for the benchmarks.

/// Quantifier bodies whose existential interpolants are benchmarked, as
/// `(body, bound variable)`.
pub const INTERPOLATION_BODIES: &[(&str, &str)] = &[
    ("(~Y -> X1) /\\ (~~Y -> X2)", "Y"),
    ("(Y \\/ ~Y) -> P /\\ Q", "Y"),
    ("P <-> ~Y \\/ ~~Y", "Y"),
    ("(P -> Y \\/ ~Y) -> P", "Y"),
    ("(X -> ~Y \\/ ~~Y) -> X", "Y"),
];

/// Sequents for the decision procedure.
pub const SEQUENTS: &[&str] = &[
    "|- ((P \\/ (P -> (Q \\/ ~Q))) -> (Q \\/ ~Q)) -> (P \\/ (P -> (Q \\/ ~Q)))",
    "|- ~~(P \\/ ~P)",
    "|- ((A -> B) -> A) -> A",
    "(A -> B) -> C, (B -> A) -> C |- C",
];

//! The guide's chapters as doc comments, so that `cargo test` runs their
//! snippets against this workspace. `mdbook test` cannot link crates.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(distributions, "distributions.md");
chapter!(commitments, "commitments.md");
chapter!(testers, "testers.md");
chapter!(sessions, "sessions.md");
chapter!(label_invariant, "label-invariant.md");
chapter!(general, "general.md");
chapter!(experiments, "experiments.md");

//! A small catalog of wall crossings and semigroup rings used as fixtures
//! and as ready-made inputs.

use crate::ring::GradedRingSpec;

pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    source: &'static str,
}

impl Example {
    pub fn spec(&self) -> GradedRingSpec {
        toml::from_str(self.source).expect("catalog entries are valid ring documents")
    }

    pub fn source(&self) -> &'static str {
        self.source
    }
}

macro_rules! example {
    ($name:literal, $summary:literal) => {
        Example { name: $name, summary: $summary, source: include_str!(concat!("../corpus/", $name, ".toml")) }
    };
}

pub const CATALOG: &[Example] = &[
    example!("conifold", "polynomial ring, weights (1,1,-1,-1), flop"),
    example!("francia", "polynomial ring, weights (1,1,-1,-2), flip"),
    example!("antiflip", "polynomial ring, weights (3,1,-1,-1), a = -2"),
    example!("hypersurface", "k[x,y,u,v]/(xu - yv), flop"),
    example!("twisted_cubic", "cone over the twisted cubic"),
    example!("line", "k[x] with positive weight"),
    example!("conifold_fine", "conifold weights with the exponent grading"),
];

pub fn example(name: &str) -> Option<&'static Example> {
    CATALOG.iter().find(|e| e.name == name)
}

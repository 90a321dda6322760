//! The shipped English tagset and the UPenn mapping.

pub const EAGLES_EN_TAGSET: &str = include_str!("../fixtures/eagles-en.tagset");
pub const UPENN_RULES: &str = include_str!("../fixtures/upenn.rules");

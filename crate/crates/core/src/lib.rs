pub mod builtins;
pub mod cartesian;
pub mod catalog;
pub mod combinators;
pub mod derivation;
pub mod model;
pub mod portgraph;
pub mod relation;
pub mod report;
pub mod ring;
pub mod search;
pub mod semantics;
pub mod syntax;
pub mod term;
pub mod theory;
pub mod translate;

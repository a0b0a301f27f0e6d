//! Workspace files, checks, reports and corpus generation for relsite.

pub mod corpus;
pub mod enumerate;
pub mod report;
pub mod workspace;

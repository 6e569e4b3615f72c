//! Regression, ANOVA and summary statistics over result tables.

pub mod aggregates;
pub mod linalg;
pub mod regression;
pub mod special;

pub use aggregates::{cell_aggregates, CellAggregate};
pub use regression::{anova, fit_ols, AnovaTable, RegressionFit, Response, PREDICTORS};

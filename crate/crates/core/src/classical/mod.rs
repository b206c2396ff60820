//! Classical baseline learners: decision stumps, CART trees, k-nearest
//! neighbours, ordinary least squares, autoregression, SVM via sequential
//! minimal optimization, random forests, and boosting. All hand-rolled on
//! plain slices so the comparison against the quantum models stays
//! dependency-free.

pub mod ar;
pub mod boost;
pub mod forest;
pub mod knn;
pub mod linreg;
pub mod stump;
pub mod svm;
pub mod tree;

pub mod apnum;
pub mod conjecture;
pub mod exact_identities;
pub mod hermite_fejer;
pub mod knots;
pub mod ratpoly;

pub mod error;
pub mod power_sum;
pub mod real;
pub mod effective;
pub mod expansion;
pub mod recursion;
pub mod summation;
pub mod shooting;
pub mod exact;
pub mod powerlaw;

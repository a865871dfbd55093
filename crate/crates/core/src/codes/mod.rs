//! Codes: self-delimiting string codes, prefix codes, and arithmetic coding.

pub mod arith;
pub mod prefix;
pub mod selfdelim;

pub use arith::{arithmetic_decode, arithmetic_encode, ideal_length, FixedBernoulli, KtPredictor, Predictor};
pub use prefix::{build_shannon_fano, kraft_sum, shannon_length, FiniteDistribution, PrefixCode};
pub use selfdelim::{
    decode_doubling, decode_standard, encode_doubling, encode_length, encode_natural, encode_standard,
    length_len, natural_len, read_doubling, read_length, read_natural, read_standard, standard_len,
};

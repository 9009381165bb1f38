pub mod error;
pub mod json;
pub mod numeric;
pub mod regex;
pub mod schema;
pub mod canonical;
pub mod validator;
pub mod simplify;
pub mod subtype;
pub mod corpus;

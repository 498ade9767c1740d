//! Files, bundles, reports, command line and HTTP service around [`catsd_core`].

pub mod bundle;
pub mod cli;
pub mod elicit;
pub mod results;
pub mod service;
pub mod table;

pub use bundle::{decode, encode, Bundle, BundleError, Dataset, Manifest, Module};
pub use results::{write_results, Detail};
pub use table::Format;

pub mod special_fn;
pub mod numerics;
pub mod fields;
pub mod spectra;
pub mod wavefunctions;
pub mod oracle;

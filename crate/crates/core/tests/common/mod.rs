pub mod oracle;
pub mod worlds;

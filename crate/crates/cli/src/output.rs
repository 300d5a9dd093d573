use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

type Render = Box<dyn Fn(&mut dyn Write) -> io::Result<()> + Send>;

/// A file to be written once all computation has succeeded.
pub struct Output {
    pub name: String,
    render: Render,
}

impl Output {
    pub fn new<F>(name: impl Into<String>, render: F) -> Self
    where
        F: Fn(&mut dyn Write) -> io::Result<()> + Send + 'static,
    {
        Output {
            name: name.into(),
            render: Box::new(render),
        }
    }

    pub fn render_to_vec(&self) -> io::Result<Vec<u8>> {
        let mut buf = Vec::new();
        (self.render)(&mut buf)?;
        Ok(buf)
    }
}

impl std::fmt::Debug for Output {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Output").field("name", &self.name).finish()
    }
}

/// Write every output under `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, outputs: &[Output]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    outputs
        .iter()
        .map(|o| {
            let path = dir.join(&o.name);
            let io_err = |source| CliError::Io {
                path: path.clone(),
                source,
            };
            let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
            (o.render)(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
            Ok(path)
        })
        .collect()
}

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use iufst::convert::nfa_to_1niufst;
use iufst::lba::Lba;
use iufst::textio::{parse_machine, serialize_machine, MachineFile};
use iufst::Transducer;

pub fn load(path: &Path) -> Result<MachineFile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_machine(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Any regular machine as a transducer: NFAs and DFAs become one-sweep
/// machines.
pub fn load_transducer(path: &Path) -> Result<Transducer> {
    match load(path)? {
        MachineFile::Niufst(t) | MachineFile::Iufst(t) => Ok(t),
        MachineFile::Nfa(n) => Ok(nfa_to_1niufst(&n)),
        MachineFile::Dfa(d) => Ok(nfa_to_1niufst(&d.to_nfa())),
        MachineFile::Lba(_) => Err(anyhow!("{}: an lba is not a transducer", path.display())),
    }
}

pub fn load_lba(path: &Path) -> Result<Lba> {
    match load(path)? {
        MachineFile::Lba(m) => Ok(m),
        other => Err(anyhow!(
            "{}: expected an lba, found {}",
            path.display(),
            other.kind().as_str()
        )),
    }
}

/// Writes to `out`, or stdout when absent.
pub fn save(m: &MachineFile, out: Option<&PathBuf>) -> Result<()> {
    let text = serialize_machine(m);
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

//! Parsing of family and constructor specs such as `e:2,1` or `id:x`.

use anyhow::{bail, ensure, Context, Result};
use iufst::hierarchy::{expo_constructor, identity_constructor, Constructor};
use iufst::textio::MachineFile;
use iufst::witness::{
    d_positives, d_reference_sweeps, gen_block, gen_block_nfa, gen_copy, gen_d, gen_e, gen_uexpo,
    gen_unary, in_block, in_copy, in_d, in_e, in_uexpo, in_unary, Family, FamilyParams,
    D_SWEEP_SLACK,
};

/// A witness family with its parameters, as written on the command line.
#[derive(Clone, Copy, Debug)]
pub struct FamilySpec(pub FamilyParams);

fn numbers(args: Option<&str>, want: usize, what: &str) -> Result<Vec<usize>> {
    let Some(args) = args else {
        bail!("{what} needs {want} parameter(s)");
    };
    let v = args
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("bad number `{s}` in {what}"))
        })
        .collect::<Result<Vec<_>>>()?;
    ensure!(
        v.len() == want,
        "{what} needs {want} parameter(s), got {}",
        v.len()
    );
    Ok(v)
}

impl std::str::FromStr for FamilySpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let family: Family = name.parse().map_err(anyhow::Error::msg)?;
        let (n, k) = match family {
            Family::Block | Family::BlockNfa => (0, numbers(args, 1, name)?[0]),
            Family::Unary | Family::E => {
                let v = numbers(args, 2, name)?;
                (v[0], v[1])
            }
            Family::D => (
                0,
                args.map_or(Ok(2), |_| numbers(args, 1, name).map(|v| v[0]))?,
            ),
            Family::Copy | Family::Uexpo => {
                ensure!(args.is_none(), "{name} takes no parameters");
                (0, 0)
            }
        };
        let p = FamilyParams { family, n, k };
        p.validate()?;
        if family == Family::D {
            ensure!(k >= 2, "d needs k >= 2");
        }
        Ok(FamilySpec(p))
    }
}

impl FamilySpec {
    pub fn machine(&self) -> Result<MachineFile> {
        let FamilyParams { family, n, k } = self.0;
        Ok(match family {
            Family::Block => MachineFile::transducer(gen_block(k)?),
            Family::BlockNfa => MachineFile::Nfa(gen_block_nfa(k)?),
            Family::Unary => MachineFile::transducer(gen_unary(n, k)?),
            Family::E => MachineFile::transducer(gen_e(n, k)?),
            Family::Copy => MachineFile::transducer(gen_copy(&["a", "b"])?),
            Family::Uexpo => MachineFile::transducer(gen_uexpo()),
            Family::D => MachineFile::transducer(gen_d()),
        })
    }

    pub fn alphabet(&self) -> &'static [&'static str] {
        match self.0.family {
            Family::Block | Family::BlockNfa => &["0", "1", "#"],
            Family::Unary | Family::Uexpo => &["a"],
            Family::E => &["a", "b"],
            Family::Copy => &["a", "b", "$"],
            Family::D => &["a", "b", "0", "1"],
        }
    }

    pub fn contains(&self, w: &[&str]) -> bool {
        let FamilyParams { family, n, k } = self.0;
        match family {
            Family::Block | Family::BlockNfa => in_block(k, w),
            Family::Unary => in_unary(n, k, w),
            Family::E => in_e(n, k, w),
            Family::Copy => in_copy(w),
            Family::Uexpo => in_uexpo(w),
            Family::D => in_d(w),
        }
    }

    /// Extra words checked beyond exhaustive enumeration: for D with k = 2,
    /// every positive instance and one mutation of each.
    pub fn corpus(&self) -> Vec<Vec<String>> {
        if self.0.family != Family::D || self.0.k != 2 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (i, w) in d_positives(2).iter().enumerate() {
            let w: Vec<String> = w.iter().map(|s| s.to_string()).collect();
            let mut bad = w.clone();
            let p = bad.len() - 1 - i % 2;
            bad[p] = if bad[p] == "a" { "b" } else { "a" }.to_string();
            out.push(w);
            out.push(bad);
        }
        out
    }

    /// Sweeps enough for every word of [`FamilySpec::corpus`].
    pub fn corpus_sweeps(&self) -> usize {
        match self.0.family {
            Family::D => d_reference_sweeps(self.0.k) + D_SWEEP_SLACK,
            _ => 0,
        }
    }

    /// Word for growth measurements at parameter `p`.
    pub fn growth_word(&self, p: usize) -> Result<Vec<String>> {
        let FamilyParams { family, n, k } = self.0;
        let s = |x: &str| x.to_string();
        Ok(match family {
            Family::Uexpo => vec![s("a"); 1 << p],
            Family::Copy => {
                let u: Vec<String> = (0..p)
                    .map(|i| s(if i % 2 == 0 { "a" } else { "b" }))
                    .collect();
                let mut w = u.clone();
                w.push(s("$"));
                w.extend(u);
                w
            }
            Family::Unary => vec![s("a"); p * n.pow(k as u32)],
            Family::D => {
                ensure!(p >= 2, "d needs k >= 2");
                let blocks = 1usize << p;
                let u: Vec<Vec<&'static str>> = vec![vec!["a"; p]; blocks];
                iufst::witness::d_word(p, &u, 1)
                    .into_iter()
                    .map(s)
                    .collect()
            }
            _ => bail!("no growth family for {family}"),
        })
    }
}

/// A constructor spec: `id[:SYM]` or `expo[:SYM]`, SYM being the payload
/// symbol (default `x`).
#[derive(Clone, Debug)]
pub struct CtorSpec {
    pub expo: bool,
    pub payload: String,
}

impl std::str::FromStr for CtorSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, payload) = s.split_once(':').unwrap_or((s, "x"));
        let expo = match name {
            "id" | "id-ctor" => false,
            "expo" | "expo-ctor" => true,
            _ => bail!("unknown constructor `{name}` (expected id or expo)"),
        };
        Ok(CtorSpec {
            expo,
            payload: payload.to_string(),
        })
    }
}

impl CtorSpec {
    pub fn build(&self) -> Result<Constructor> {
        let payload = [self.payload.as_str()];
        Ok(if self.expo {
            expo_constructor(&payload)?
        } else {
            identity_constructor(&payload)?
        })
    }
}

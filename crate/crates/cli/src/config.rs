use std::fmt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use parahoric::{CartanType, Family};
use serde::Serialize;

use crate::{AtlasArgs, Command, Common, Format, IsogenyArg, PointArgs, Suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_NOT_COMPUTED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Malformed input file, with a location when the parser knows one.
    Input {
        path: PathBuf,
        location: Option<(usize, usize)>,
        message: String,
    },
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => EXIT_USAGE,
            CliError::Output(_) => EXIT_FAILED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Input { path, location: Some((l, c)), message } => {
                write!(f, "{}:{l}:{c}: {message}", path.display())
            }
            CliError::Input { path, location: None, message } => write!(f, "{}: {message}", path.display()),
            CliError::Output(m) => write!(f, "cannot write report: {m}"),
        }
    }
}

/// Everything that determines a report. Serialized into the report as given.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub families: Vec<Family>,
    pub ranks: Vec<usize>,
    pub max_rank: usize,
    pub twists: Vec<u8>,
    pub inner: Vec<usize>,
    pub isogeny: Option<IsogenyArg>,
    pub order: Option<i64>,
    pub kac_file: Option<String>,
    pub form_file: Option<String>,
    pub seed: u64,
    pub weyl_guard: usize,
    pub max_dim: usize,
    pub time_limit: Option<u64>,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Result<Self, CliError> {
        let (name, common, atlas, point): (&str, &Common, Option<&AtlasArgs>, Option<&PointArgs>) = match command {
            Command::Build(c) => ("build", c, None, None),
            Command::Atlas(a) => ("atlas", &a.common, Some(a), None),
            Command::PseudoLevi(p) => ("pseudo-levi", &p.common, None, Some(p)),
            Command::ComponentGroup(p) => ("component-group", &p.common, None, Some(p)),
            Command::Fdeg(p) => ("fdeg", &p.common, None, Some(p)),
            Command::Verify { suite } => match suite {
                Suite::Lemmas(c) => ("verify lemmas", c, None, None),
                Suite::Pinning(a) => ("verify pinning", &a.common, Some(a), None),
                Suite::Kottwitz(p) => ("verify kottwitz", &p.common, None, Some(p)),
                Suite::Apartment(p) => ("verify apartment", &p.common, None, Some(p)),
            },
        };
        let mut families = Vec::new();
        for f in &common.family {
            let fam: Family = f.parse().map_err(|e: parahoric::Error| CliError::Usage(e.to_string()))?;
            if !families.contains(&fam) {
                families.push(fam);
            }
        }
        families.sort();
        let mut ranks = common.rank.clone();
        ranks.sort_unstable();
        ranks.dedup();
        let mut twists = common.twist.clone();
        twists.sort_unstable();
        twists.dedup();
        if let Some(t) = twists.iter().find(|t| !(1..=3).contains(*t)) {
            return Err(CliError::Usage(format!("twist must be 1, 2 or 3, got {t}")));
        }
        let mut inner = atlas.map(|a| a.inner.clone()).unwrap_or_default();
        inner.sort_unstable();
        inner.dedup();
        let positive = [
            ("--max-rank", common.max_rank as u64),
            ("--weyl-guard", common.weyl_guard as u64),
            ("--max-dim", common.max_dim as u64),
            ("--time-limit", common.time_limit.unwrap_or(1)),
            ("--jobs", common.jobs.unwrap_or(1) as u64),
            ("--order", point.map_or(1, |p| p.order.max(0) as u64)),
        ];
        if let Some((flag, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Usage(format!("{flag} must be positive")));
        }
        let jobs = common.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let config = RunConfig {
            command: name.to_string(),
            families,
            ranks,
            max_rank: common.max_rank,
            twists,
            inner,
            isogeny: point.map(|p| p.isogeny),
            order: point.filter(|p| p.kac.is_none()).map(|p| p.order),
            kac_file: point.and_then(|p| p.kac.as_ref()).map(|p| p.display().to_string()),
            form_file: atlas.and_then(|a| a.form.as_ref()).map(|p| p.display().to_string()),
            seed: common.seed,
            weyl_guard: common.weyl_guard,
            max_dim: common.max_dim,
            time_limit: common.time_limit,
            format: common.format,
            output: common.output.clone(),
            jobs,
            deadline: common.time_limit.map(|s| Instant::now() + Duration::from_secs(s)),
        };
        if config.form_file.is_none() && config.types().is_empty() {
            return Err(CliError::Usage("no Cartan type left in scope after filtering".into()));
        }
        Ok(config)
    }

    /// Untwisted types in scope, in family then rank order.
    pub fn types(&self) -> Vec<CartanType> {
        CartanType::all_up_to(self.max_rank)
            .into_iter()
            .filter(|t| self.families.is_empty() || self.families.contains(&t.family))
            .filter(|t| self.ranks.is_empty() || self.ranks.contains(&t.rank))
            .collect()
    }

    pub fn twist_allowed(&self, twist: u8) -> bool {
        self.twists.is_empty() || self.twists.contains(&twist)
    }

    pub fn inner_allowed(&self, node: usize) -> bool {
        self.inner.is_empty() || self.inner.contains(&node)
    }

    pub fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

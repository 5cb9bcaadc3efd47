use std::fmt::Write as _;
use std::path::Path;

/// Twelve significant digits in scientific notation; `nan` for missing values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => num(*x),
            Cell::Text(t) => t.clone(),
        }
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(t: &str) -> Self {
        Cell::Text(t.into())
    }
}

impl From<String> for Cell {
    fn from(t: String) -> Self {
        Cell::Text(t)
    }
}

/// One CSV artifact: a comment line with units and the config hash, the
/// column names, then rows in the order they were pushed.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub units: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// `(x, y, series)` column names for the optional plotting script.
    pub plot: Option<(&'static str, &'static str, Option<&'static str>)>,
}

impl Table {
    pub fn new(name: impl Into<String>, units: &'static str, columns: &[&'static str]) -> Self {
        Table { name: name.into(), units, columns: columns.to_vec(), rows: Vec::new(), plot: None }
    }

    pub fn plotted(mut self, x: &'static str, y: &'static str, series: Option<&'static str>) -> Self {
        self.plot = Some((x, y, series));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn render(&self, experiment: &str, config_hash: &str) -> String {
        let mut out = String::new();
        writeln!(out, "# mipt {experiment}: {} | units: {} | config_sha256={config_hash}", self.name, self.units).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn plot_script(&self) -> Option<String> {
        let (x, y, series) = self.plot?;
        let group = match series {
            Some(s) => format!(
                "for key, part in data.groupby(\"{s}\"):\n    plt.plot(part[\"{x}\"], part[\"{y}\"], \"o-\", label=f\"{s}={{key}}\")\nplt.legend()\n"
            ),
            None => format!("plt.plot(data[\"{x}\"], data[\"{y}\"], \"o-\")\n"),
        };
        Some(format!(
            "import pandas as pd\nimport matplotlib.pyplot as plt\n\ndata = pd.read_csv(\"{file}\", comment=\"#\")\n{group}plt.xlabel(\"{x}\")\nplt.ylabel(\"{y}\")\nplt.savefig(\"{name}.png\", dpi=150)\n",
            file = self.file_name(),
            name = self.name,
        ))
    }

    pub fn write(&self, dir: &Path, experiment: &str, config_hash: &str) -> std::io::Result<String> {
        let name = self.file_name();
        std::fs::write(dir.join(&name), self.render(experiment, config_hash))?;
        Ok(name)
    }
}

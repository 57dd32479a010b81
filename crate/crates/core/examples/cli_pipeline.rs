// The command-line workflow driven in-process: synthesize a dataset, train,
// predict and evaluate, all through files in a scratch directory.
//
// cargo run --example cli_pipeline

use sdpm::cli::{run_with, EXIT_OK};

fn sdpm(args: &[&str]) -> sdpm::Result<String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sdpm").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    if code != EXIT_OK {
        return Err(sdpm::Error::InvalidArgument(format!(
            "sdpm {} exited with {code}: {}",
            args.join(" "),
            String::from_utf8_lossy(&err)
        )));
    }
    Ok(String::from_utf8_lossy(&out).into_owned())
}

/// Returns the evaluation report text.
pub fn run_example() -> sdpm::Result<String> {
    let dir = tempfile::tempdir()?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (data, model, preds) = (path("data.txt"), path("model.txt"), path("preds.csv"));

    sdpm(&[
        "synth", "--kind", "subspace", "--d", "4", "--k", "3", "--n", "8", "--noise", "0",
        "--seed", "1", "--out", &data,
    ])?;
    sdpm(&[
        "train",
        "--data",
        &data,
        "--solver",
        "maxmargin",
        "--nu",
        "0.2",
        "--out",
        &model,
    ])?;
    sdpm(&[
        "predict", "--model", &model, "--data", &data, "--out", &preds,
    ])?;
    sdpm(&[
        "eval",
        "--model",
        &model,
        "--data",
        &data,
        "--gap-classes",
        "1,2",
    ])
}

#[allow(dead_code)]
fn main() -> sdpm::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

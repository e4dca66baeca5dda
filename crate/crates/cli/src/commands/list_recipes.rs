use crate::error::Result;
use crate::recipes;

#[derive(clap::Args, Clone, Debug)]
pub struct Args {
    /// Print the full recipe instead of the list.
    #[arg(long)]
    pub show: Option<String>,
}

pub fn run(args: &Args) -> Result<Vec<String>> {
    match &args.show {
        Some(name) => println!("{}", serde_json::to_string_pretty(&recipes::find(name)?)?),
        None => {
            for r in recipes::all() {
                println!("{:<11} {:<14} {}", r.name, r.command, r.description);
                println!("{:<26} runtime: {}", "", r.runtime);
            }
            println!("\nrun one with: transmon <command> --recipe <name> --out <dir>");
        }
    }
    Ok(Vec::new())
}

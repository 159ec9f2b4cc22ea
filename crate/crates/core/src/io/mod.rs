//! CSV datasets in, JSON/CSV reports and plot data out.

mod dataset;
mod plot;
mod report;

pub use dataset::{read_dataset, read_table, write_dataset, write_dataset_to, Dataset};
pub use plot::emit_plot_data;
pub use report::{
    read_report, summarize, write_report, DatasetSummary, DatasetValidation, ExtrapolationEntry, NuScan,
    ReferenceEntry, Report, ReportFormat, RunConfig, StatisticEstimate, Timing,
};

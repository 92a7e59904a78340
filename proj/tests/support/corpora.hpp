#pragma once

// Synthetic corpora: a bijective-dictionary corpus for the aligner, a
// template-based English/Hindi toy corpus with annotations, and a planted
// passage/question collection for the QA pipeline.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace synth {

inline std::size_t pick(std::mt19937& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// ---------------------------------------------------------------------------
// Bijective dictionary corpus: source word sK translates to target word tK;
// the target side is a random permutation of the translated source words.

struct BijectiveCorpus {
    std::vector<std::pair<std::string, std::string>> lines;     // source, target
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> gold;  // per line
};

inline BijectiveCorpus bijective_corpus(std::size_t sentences, std::size_t vocab, std::uint32_t seed,
                                        std::size_t min_len = 4, std::size_t max_len = 10)
{
    std::mt19937 rng(seed);
    BijectiveCorpus c;
    for (std::size_t k = 0; k < sentences; ++k) {
        std::size_t len = min_len + pick(rng, max_len - min_len + 1);
        std::vector<std::size_t> words;
        while (words.size() < len) {
            std::size_t w = pick(rng, vocab);
            if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
        }
        std::vector<std::size_t> perm(len);
        for (std::size_t i = 0; i < len; ++i) perm[i] = i;
        for (std::size_t i = len; i > 1; --i) std::swap(perm[i - 1], perm[pick(rng, i)]);
        std::string src, tgt;
        std::vector<std::pair<std::size_t, std::size_t>> links;
        for (std::size_t i = 0; i < len; ++i) src += (i ? " s" : "s") + std::to_string(words[i]);
        for (std::size_t j = 0; j < len; ++j) {
            tgt += (j ? " t" : "t") + std::to_string(words[perm[j]]);
            links.emplace_back(perm[j], j);
        }
        std::sort(links.begin(), links.end());
        c.lines.emplace_back(src, tgt);
        c.gold.push_back(std::move(links));
    }
    return c;
}

// ---------------------------------------------------------------------------
// English/Hindi toy corpus

struct Entry {
    const char* en;
    const char* hi;
};

inline const std::vector<Entry>& people()
{
    static const std::vector<Entry> v = {
        {"Ravi", "रवि"},     {"Priya", "प्रिया"},   {"Amit", "अमित"},   {"Sunita", "सुनीता"}, {"Rahul", "राहुल"},
        {"Anita", "अनीता"},  {"Vikram", "विक्रम"},  {"Meena", "मीना"},  {"Arjun", "अर्जुन"},  {"Kavita", "कविता"},
        {"Suresh", "सुरेश"}, {"Neha", "नेहा"},      {"Rohan", "रोहन"},  {"Pooja", "पूजा"},    {"Karan", "करण"},
        {"Asha", "आशा"},     {"Deepak", "दीपक"},    {"Geeta", "गीता"},  {"Manoj", "मनोज"},    {"Lata", "लता"}};
    return v;
}

inline const std::vector<Entry>& places()
{
    static const std::vector<Entry> v = {
        {"Delhi", "दिल्ली"}, {"Mumbai", "मुंबई"},   {"Shimla", "शिमला"},   {"Lucknow", "लखनऊ"}, {"Jaipur", "जयपुर"},
        {"Patna", "पटना"},   {"Agra", "आगरा"},      {"Pune", "पुणे"},       {"Chennai", "चेन्नई"}, {"Kolkata", "कोलकाता"},
        {"Bhopal", "भोपाल"}, {"Indore", "इंदौर"},   {"Goa", "गोवा"},       {"Varanasi", "वाराणसी"}, {"Nagpur", "नागपुर"}};
    return v;
}

inline const std::vector<Entry>& companies()
{
    static const std::vector<Entry> v = {{"Tata", "टाटा"},       {"Infosys", "इंफोसिस"}, {"Wipro", "विप्रो"},
                                         {"Amul", "अमूल"},       {"Reliance", "रिलायंस"}, {"ISRO", "इसरो"}};
    return v;
}

inline const std::vector<Entry>& nouns()
{
    static const std::vector<Entry> v = {
        {"book", "किताब"},     {"car", "गाड़ी"},        {"house", "मकान"},     {"river", "नदी"},
        {"temple", "मंदिर"},   {"market", "बाज़ार"},    {"garden", "बगीचा"},   {"letter", "पत्र"},
        {"film", "फ़िल्म"},     {"hospital", "अस्पताल"}, {"road", "सड़क"},      {"festival", "त्योहार"},
        {"museum", "संग्रहालय"}, {"bridge", "पुल"},      {"farm", "खेत"},       {"library", "पुस्तकालय"},
        {"station", "स्टेशन"},  {"shop", "दुकान"},       {"lake", "झील"},       {"palace", "महल"}};
    return v;
}

inline const std::vector<Entry>& adjectives()
{
    static const std::vector<Entry> v = {{"big", "बड़ा"},      {"small", "छोटा"},    {"old", "पुराना"},
                                         {"beautiful", "सुंदर"}, {"famous", "प्रसिद्ध"}, {"red", "लाल"},
                                         {"clean", "साफ़"},     {"busy", "व्यस्त"},   {"quiet", "शांत"},
                                         {"ancient", "प्राचीन"}};
    return v;
}

/// One English token with its annotation columns, or one Hindi token.
struct EnTok {
    std::string word, pos, ne, np;
};

struct ToySentence {
    std::vector<EnTok> en;
    std::vector<std::string> hi;
};

inline ToySentence toy_sentence(std::mt19937& rng)
{
    const auto& P = people();
    const auto& L = places();
    const auto& O = companies();
    const auto& N = nouns();
    const auto& A = adjectives();
    auto per = P[pick(rng, P.size())];
    auto per2 = P[pick(rng, P.size())];
    while (std::string(per2.en) == per.en) per2 = P[pick(rng, P.size())];
    auto loc = L[pick(rng, L.size())];
    auto org = O[pick(rng, O.size())];
    auto noun = N[pick(rng, N.size())];
    auto noun2 = N[pick(rng, N.size())];
    while (std::string(noun2.en) == noun.en) noun2 = N[pick(rng, N.size())];
    auto adj = A[pick(rng, A.size())];

    ToySentence s;
    auto en = [&](std::string w, std::string pos, std::string ne = "O", std::string np = "O") {
        s.en.push_back({std::move(w), std::move(pos), std::move(ne), std::move(np)});
    };
    auto hi = [&](std::initializer_list<std::string> ws) {
        for (const auto& w : ws) s.hi.push_back(w);
    };
    switch (pick(rng, 8)) {
    case 0:
        en(per.en, "NNP", "B-PER", "B-NP"), en("visited", "VBD"), en("the", "DT", "O", "B-NP"),
            en(adj.en, "JJ", "O", "I-NP"), en(noun.en, "NN", "O", "I-NP"), en("in", "IN"),
            en(loc.en, "NNP", "B-LOC", "B-NP"), en(".", ".");
        hi({per.hi, "ने", loc.hi, "में", adj.hi, noun.hi, "देखा", "।"});
        break;
    case 1:
        en("The", "DT", "O", "B-NP"), en(noun.en, "NN", "O", "I-NP"), en("of", "IN"),
            en(loc.en, "NNP", "B-LOC", "B-NP"), en("is", "VBZ"), en("very", "RB"), en(adj.en, "JJ"), en(".", ".");
        hi({loc.hi, "का", noun.hi, "बहुत", adj.hi, "है", "।"});
        break;
    case 2:
        en(per.en, "NNP", "B-PER", "B-NP"), en("works", "VBZ"), en("for", "IN"), en(org.en, "NNP", "B-ORG", "B-NP"),
            en("in", "IN"), en(loc.en, "NNP", "B-LOC", "B-NP"), en(".", ".");
        hi({per.hi, loc.hi, "में", org.hi, "के", "लिए", "काम", "करता", "है", "।"});
        break;
    case 3:
        en(per.en, "NNP", "B-PER", "B-NP"), en("and", "CC"), en(per2.en, "NNP", "B-PER", "B-NP"),
            en("bought", "VBD"), en("a", "DT", "O", "B-NP"), en(adj.en, "JJ", "O", "I-NP"),
            en(noun.en, "NN", "O", "I-NP"), en(".", ".");
        hi({per.hi, "और", per2.hi, "ने", "एक", adj.hi, noun.hi, "खरीदा", "।"});
        break;
    case 4:
        en("The", "DT", "O", "B-NP"), en(adj.en, "JJ", "O", "I-NP"), en(noun.en, "NN", "O", "I-NP"),
            en("is", "VBZ"), en("near", "IN"), en("the", "DT", "O", "B-NP"), en(noun2.en, "NN", "O", "I-NP"),
            en(".", ".");
        hi({adj.hi, noun.hi, noun2.hi, "के", "पास", "है", "।"});
        break;
    case 5:
        en(org.en, "NNP", "B-ORG", "B-NP"), en("opened", "VBD"), en("a", "DT", "O", "B-NP"),
            en(noun.en, "NN", "O", "I-NP"), en("in", "IN"), en(loc.en, "NNP", "B-LOC", "B-NP"), en(".", ".");
        hi({org.hi, "ने", loc.hi, "में", "एक", noun.hi, "खोला", "।"});
        break;
    case 6:
        en(per.en, "NNP", "B-PER", "B-NP"), en("lives", "VBZ"), en("in", "IN"), en(loc.en, "NNP", "B-LOC", "B-NP"),
            en("with", "IN"), en(per2.en, "NNP", "B-PER", "B-NP"), en(".", ".");
        hi({per.hi, per2.hi, "के", "साथ", loc.hi, "में", "रहता", "है", "।"});
        break;
    default:
        en("We", "PRP", "O", "B-NP"), en("saw", "VBD"), en("a", "DT", "O", "B-NP"), en(adj.en, "JJ", "O", "I-NP"),
            en(noun.en, "NN", "O", "I-NP"), en("yesterday", "NN", "O", "B-NP"), en(".", ".");
        hi({"हमने", "कल", "एक", adj.hi, noun.hi, "देखा", "।"});
        break;
    }
    return s;
}

struct ToyCorpus {
    std::string pairs_tsv;
    std::string en_conll;
};

inline ToyCorpus toy_corpus(std::size_t n, std::uint32_t seed)
{
    std::mt19937 rng(seed);
    std::ostringstream pairs, conll;
    for (std::size_t k = 0; k < n; ++k) {
        auto s = toy_sentence(rng);
        std::string en;
        for (std::size_t i = 0; i < s.en.size(); ++i) en += (i ? " " : "") + s.en[i].word;
        std::string hi;
        for (std::size_t i = 0; i < s.hi.size(); ++i) hi += (i ? " " : "") + s.hi[i];
        pairs << en << '\t' << hi << '\n';
        for (const auto& t : s.en) conll << t.word << '\t' << t.pos << '\t' << t.ne << '\t' << t.np << '\n';
        conll << '\n';
    }
    return {pairs.str(), conll.str()};
}

// ---------------------------------------------------------------------------
// Planted QA collection: 10 questions, each with one passage holding the
// answer in a sentence that covers every query term, and one distractor
// passage with an entity of the same type next to fewer query terms.

struct PlantedToken {
    std::string word, pos, ne;
};

struct PlantedPassage {
    std::string id;
    std::vector<std::vector<PlantedToken>> sentences;
};

struct PlantedQuestion {
    std::string id;
    std::vector<PlantedToken> tokens;
    std::string answer_type;
    std::string answer;
    std::string gold_passage;
};

struct PlantedQa {
    std::vector<PlantedPassage> passages;
    std::vector<PlantedQuestion> questions;
};

inline std::vector<PlantedToken> planted_sentence(const std::string& text)
{
    // Words carry inline tags: "word/POS" or "word/POS/NE" with NE in BIO.
    std::vector<PlantedToken> out;
    std::istringstream in(text);
    std::string item;
    while (in >> item) {
        PlantedToken t;
        auto a = item.find('/');
        t.word = item.substr(0, a);
        auto rest = item.substr(a + 1);
        auto b = rest.find('/');
        t.pos = rest.substr(0, b);
        t.ne = b == std::string::npos ? "O" : rest.substr(b + 1);
        out.push_back(std::move(t));
    }
    return out;
}

inline PlantedQa planted_qa()
{
    struct Plant {
        const char* question;
        const char* type;
        const char* answer;
        const char* gold1;  // answer sentence
        const char* gold2;  // second sentence of the gold passage
        const char* distractor1;
        const char* distractor2;
    };
    static const Plant plants[] = {
        {"Who/WP founded/VBD the/DT botanical/JJ garden/NN ?/.", "PERSON", "Ravi Sharma",
         "The/DT botanical/JJ garden/NN was/VBD founded/VBN by/IN Ravi/NNP/B-PER Sharma/NNP/I-PER in/IN 1901/CD ./.",
         "Visitors/NNS from/IN Patna/NNP/B-LOC enjoy/VBP the/DT garden/NN ./.",
         "Meena/NNP/B-PER Rao/NNP/I-PER visited/VBD a/DT botanical/JJ exhibition/NN ./.",
         "The/DT exhibition/NN was/VBD crowded/JJ ./."},
        {"Who/WP designed/VBD the/DT stone/NN bridge/NN ?/.", "PERSON", "Arjun Mehta",
         "The/DT stone/NN bridge/NN was/VBD designed/VBN by/IN Arjun/NNP/B-PER Mehta/NNP/I-PER ./.",
         "It/PRP crosses/VBZ a/DT wide/JJ river/NN near/IN Agra/NNP/B-LOC ./.",
         "Kavita/NNP/B-PER Iyer/NNP/I-PER sold/VBD stone/NN tiles/NNS ./.",
         "Her/PRP$ shop/NN is/VBZ small/JJ ./."},
        {"Which/WDT company/NN built/VBD the/DT river/NN dam/NN ?/.", "ORGANIZATION", "Larsen Toubro",
         "The/DT river/NN dam/NN was/VBD built/VBN by/IN Larsen/NNP/B-ORG Toubro/NNP/I-ORG for/IN the/DT "
         "company/NN ./.",
         "Water/NN from/IN the/DT dam/NN reaches/VBZ Bhopal/NNP/B-LOC ./.",
         "Wipro/NNP/B-ORG studied/VBD the/DT river/NN ./.", "The/DT study/NN took/VBD years/NNS ./."},
        {"Where/WRB is/VBZ the/DT marble/NN temple/NN located/VBN ?/.", "LOCATION", "Udaipur",
         "The/DT marble/NN temple/NN is/VBZ located/VBN in/IN Udaipur/NNP/B-LOC ./.",
         "Pilgrims/NNS visit/VBP the/DT temple/NN every/DT spring/NN ./.",
         "Marble/NN from/IN Makrana/NNP/B-LOC is/VBZ famous/JJ ./.", "Traders/NNS sell/VBP it/PRP ./."},
        {"Who/WP opened/VBD the/DT science/NN museum/NN ?/.", "PERSON", "Sunita Verma",
         "The/DT science/NN museum/NN was/VBD opened/VBN by/IN Sunita/NNP/B-PER Verma/NNP/I-PER ./.",
         "The/DT museum/NN has/VBZ many/JJ models/NNS ./.",
         "Rohan/NNP/B-PER Das/NNP/I-PER teaches/VBZ science/NN ./.", "He/PRP lives/VBZ nearby/RB ./."},
        {"Which/WDT company/NN owns/VBZ the/DT tea/NN estate/NN ?/.", "ORGANIZATION", "Amul",
         "The/DT tea/NN estate/NN is/VBZ owned/VBN by/IN Amul/NNP/B-ORG ,/, the/DT dairy/NN company/NN ./.",
         "The/DT estate/NN employs/VBZ hundreds/NNS ./.",
         "Infosys/NNP/B-ORG serves/VBZ tea/NN in/IN its/PRP$ offices/NNS ./.", "The/DT offices/NNS are/VBP big/JJ ./."},
        {"Where/WRB is/VBZ the/DT hill/NN fort/NN located/VBN ?/.", "LOCATION", "Gwalior",
         "The/DT hill/NN fort/NN is/VBZ located/VBN in/IN Gwalior/NNP/B-LOC ./.",
         "The/DT fort/NN has/VBZ six/CD palaces/NNS ./.",
         "A/DT hill/NN road/NN connects/VBZ Indore/NNP/B-LOC and/CC Dewas/NNP/B-LOC ./.",
         "The/DT road/NN is/VBZ new/JJ ./."},
        {"When/WRB was/VBD the/DT railway/NN station/NN inaugurated/VBN ?/.", "DATE", "1925",
         "The/DT railway/NN station/NN was/VBD inaugurated/VBN in/IN 1925/CD ./.",
         "The/DT station/NN has/VBZ four/CD platforms/NNS ./.",
         "The/DT railway/NN museum/NN started/VBD in/IN 1977/CD ./.", "It/PRP shows/VBZ old/JJ engines/NNS ./."},
        {"Who/WP started/VBD the/DT music/NN festival/NN ?/.", "PERSON", "Neha Kapoor",
         "The/DT music/NN festival/NN was/VBD started/VBN by/IN Neha/NNP/B-PER Kapoor/NNP/I-PER ./.",
         "The/DT festival/NN draws/VBZ crowds/NNS from/IN Pune/NNP/B-LOC ./.",
         "Deepak/NNP/B-PER Joshi/NNP/I-PER studies/VBZ music/NN ./.", "He/PRP plays/VBZ the/DT sitar/NN ./."},
        {"Where/WRB is/VBZ the/DT salt/NN lake/NN located/VBN ?/.", "LOCATION", "Sambhar",
         "The/DT salt/NN lake/NN is/VBZ located/VBN in/IN Sambhar/NNP/B-LOC ./.",
         "Flamingos/NNS visit/VBP the/DT lake/NN ./.",
         "Salt/NN traders/NNS from/IN Kutch/NNP/B-LOC arrived/VBD ./.", "They/PRP came/VBD by/IN camel/NN ./."},
    };
    PlantedQa qa;
    int k = 0;
    for (const auto& s : plants) {
        PlantedPassage gold{"p" + std::to_string(2 * k), {planted_sentence(s.gold1), planted_sentence(s.gold2)}};
        PlantedPassage distract{"p" + std::to_string(2 * k + 1),
                                {planted_sentence(s.distractor1), planted_sentence(s.distractor2)}};
        qa.passages.push_back(gold);
        qa.passages.push_back(distract);
        qa.questions.push_back({"q" + std::to_string(k), planted_sentence(s.question), s.type, s.answer, gold.id});
        ++k;
    }
    return qa;
}

}  // namespace synth

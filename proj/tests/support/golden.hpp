#pragma once

// Hand-built inputs for the golden mixer cases: annotated Hindi questions
// with a small lexicon and n-gram counts, and two annotated, word-aligned
// translation pairs.

#include <string>

namespace golden {

// Hindi questions, CoNLL columns token/pos/ne/np.
inline const char* questions_conll =
    "# id = q1\n"
    "महात्मा\tNNP\tB-PER\tB-NP\n"
    "गांधी\tNNP\tI-PER\tI-NP\n"
    "का\tPSP\tO\tO\n"
    "जन्म\tNN\tO\tB-NP\n"
    "कब\tWQ\tO\tO\n"
    "हुआ\tVM\tO\tO\n"
    "था\tVAUX\tO\tO\n"
    "?\tSYM\tO\tO\n"
    "\n"
    "# id = q2\n"
    "सिएटल\tNNP\tB-LOC\tB-NP\n"
    "में\tPSP\tO\tO\n"
    "बेसबॉल\tNN\tO\tB-NP\n"
    "दल\tNN\tO\tI-NP\n"
    "का\tPSP\tO\tO\n"
    "नाम\tNN\tO\tB-NP\n"
    "क्या\tWQ\tO\tO\n"
    "है\tVM\tO\tO\n"
    "?\tSYM\tO\tO\n";

inline const char* q1_expected = "Mahatma Gandhi ka birth kab hua tha?";
inline const char* q2_expected = "Seattle mein baseball team ka naam kya hai?";

// नाम is deliberately missing, so it falls back to transliteration.
inline const char* lexicon_tsv =
    "जन्म\tbirth\t0.7\n"
    "जन्म\torigin\t0.2\n"
    "सिएटल\tSeattle\t0.9\n"
    "बेसबॉल\tbaseball\t0.95\n"
    "दल\tparty\t0.5\n"
    "दल\tteam\t0.3\n"
    "दल\tgroup\t0.2\n"
    "शहर\tcity\t0.8\n"
    "पूर्व\tEast\t0.5\n"
    "पूर्व\tBC\t0.4\n"
    "स्कॉटलैंड\tScotland\t0.9\n";

inline const char* unigrams_tsv =
    "birth\t40\n"
    "origin\t25\n"
    "seattle\t12\n"
    "baseball\t50\n"
    "party\t80\n"
    "team\t60\n"
    "group\t40\n"
    "city\t8\n"
    "east\t4\n"
    "bc\t5\n"
    "scotland\t6\n";

inline const char* bigrams_tsv =
    "baseball team\t30\n"
    "seattle baseball\t3\n"
    "city east\t2\n"
    "east scotland\t2\n"
    "birth date\t7\n";

// Translation pairs with English annotations and Pharaoh links.
inline const char* pairs_en_hi = "India's agriculture is their main strength .\tभारत की कृषि इसकी मुख्य ताकत है ।\n";
inline const char* ann_en_hi =
    "India's\tNNP\tB-LOC\tB-NP\n"
    "agriculture\tNN\tO\tI-NP\n"
    "is\tVBZ\tO\tO\n"
    "their\tPRP$\tO\tO\n"
    "main\tJJ\tO\tB-NP\n"
    "strength\tNN\tO\tI-NP\n"
    ".\t.\tO\tO\n";
inline const char* links_en_hi = "0-0 0-1 1-2 2-6 3-3 4-4 5-5 6-7\n";
inline const char* expected_en_hi = "India's कृषि इसकी main strength है।";

inline const char* pairs_en_de = "Democracy and development go hand in hand .\tDemokratie und Entwicklung gehen Hand in Hand .\n";
inline const char* ann_en_de =
    "Democracy\tNN\tO\tB-NP\n"
    "and\tCC\tO\tO\n"
    "development\tNN\tO\tB-NP\n"
    "go\tVBP\tO\tO\n"
    "hand\tNN\tO\tB-NP\n"
    "in\tIN\tO\tO\n"
    "hand\tNN\tO\tO\n"
    ".\t.\tO\tO\n";
inline const char* links_en_de = "0-0 1-1 2-2 3-3 4-4 5-5 6-6 7-7\n";
inline const char* expected_en_de = "Democracy und Development gehen Hand in Hand.";

}  // namespace golden

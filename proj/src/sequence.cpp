#include "boltzfold/sequence.hpp"

#include <algorithm>
#include <stack>

#include "boltzfold/energy_model.hpp"
#include "boltzfold/errors.hpp"

namespace boltzfold {

void Sequence::validate() const {
    if (bases.empty()) throw ValidationError("sequence '" + id + "' is empty");
    for (std::size_t i = 0; i < bases.size(); ++i) {
        char c = bases[i];
        if (c != 'A' && c != 'C' && c != 'G' && c != 'T')
            throw ValidationError("sequence '" + id + "': bad base '" + std::string(1, c) +
                                  "' at position " + std::to_string(i + 1));
    }
}

int SecondaryStructure::pair_count() const {
    int c = 0;
    for (std::size_t i = 0; i < pair_table.size(); ++i)
        if (pair_table[i] > static_cast<int>(i)) ++c;
    return c;
}

std::string SecondaryStructure::dot_bracket() const {
    std::string s(pair_table.size(), '.');
    for (std::size_t i = 0; i < pair_table.size(); ++i) {
        if (pair_table[i] > static_cast<int>(i)) {
            s[i] = '(';
            s[pair_table[i]] = ')';
        }
    }
    return s;
}

SecondaryStructure SecondaryStructure::from_dot_bracket(const std::string& db) {
    SecondaryStructure s(static_cast<int>(db.size()));
    std::stack<int> open;
    for (std::size_t i = 0; i < db.size(); ++i) {
        if (db[i] == '(') {
            open.push(static_cast<int>(i));
        } else if (db[i] == ')') {
            if (open.empty()) throw ValidationError("unbalanced ')' in dot-bracket string");
            s.add_pair(open.top(), static_cast<int>(i));
            open.pop();
        } else if (db[i] != '.') {
            throw ValidationError("bad character '" + std::string(1, db[i]) + "' in dot-bracket string");
        }
    }
    if (!open.empty()) throw ValidationError("unbalanced '(' in dot-bracket string");
    return s;
}

std::vector<std::pair<int, int>> SecondaryStructure::pairs() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < pair_table.size(); ++i)
        if (pair_table[i] > static_cast<int>(i)) out.emplace_back(static_cast<int>(i), pair_table[i]);
    return out;
}

void SecondaryStructure::validate(const Sequence& seq, const EnergyParameters& params) const {
    if (seq.length() != length())
        throw ValidationError("structure length " + std::to_string(length()) +
                              " does not match sequence length " + std::to_string(seq.length()));
    for (int i = 0; i < length(); ++i) {
        int j = pair_table[i];
        if (j == UNPAIRED) continue;
        if (j < 0 || j >= length() || j == i)
            throw ValidationError("pair partner out of range at position " + std::to_string(i + 1));
        if (pair_table[j] != i)
            throw ValidationError("asymmetric pair table at position " + std::to_string(i + 1));
        if (j > i) {
            if (j - i - 1 < params.min_hairpin_unpaired)
                throw ValidationError("hairpin gap violation at pair (" + std::to_string(i + 1) +
                                      "," + std::to_string(j + 1) + ")");
            if (!params.can_pair(seq.bases[i], seq.bases[j]))
                throw ValidationError("disallowed pair " + std::string(1, seq.bases[i]) + "·" +
                                      std::string(1, seq.bases[j]) + " at (" + std::to_string(i + 1) +
                                      "," + std::to_string(j + 1) + ")");
        }
    }
    // Non-crossing: an open pair on the stack must close before any
    // enclosing pair does.
    std::stack<int> open;
    for (int i = 0; i < length(); ++i) {
        int j = pair_table[i];
        if (j == UNPAIRED) continue;
        if (j > i) {
            open.push(j);
        } else {
            if (open.empty() || open.top() != i)
                throw ValidationError("crossing pairs at position " + std::to_string(i + 1));
            open.pop();
        }
    }
}

}  // namespace boltzfold

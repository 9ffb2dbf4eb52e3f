#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qvfuse {

/// Tokenize and normalize raw text: lowercase, split on any non-alphanumeric
/// byte, drop stopwords, then strip a trailing 's' from tokens longer than
/// three characters. Empty input yields an empty sequence.
std::vector<std::string> normalize(std::string_view text);

bool is_stopword(std::string_view token);

/// The bundled stoplist, in list order.
const std::vector<std::string>& stopword_list();

}  // namespace qvfuse

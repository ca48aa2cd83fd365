#pragma once

#include <string>
#include <vector>

#include "fnd/corpus.hpp"

namespace fnd::test {

// Minimal labeled article; engagement-free unless specified.
inline NewsArticle make_article(std::string id, std::string text, int label,
                                std::string headline = "") {
  NewsArticle a;
  a.id = std::move(id);
  a.domain = Domain::kPolitics;
  a.publisher.user_name = "src";
  a.publisher.sex = Sex::kUnknown;
  a.content.headline = std::move(headline);
  a.content.text = std::move(text);
  a.label = label == 1 ? Label::kFake : Label::kReal;
  return a;
}

inline Corpus make_corpus(std::vector<NewsArticle> articles,
                          std::string name = "test") {
  Corpus c;
  c.name = std::move(name);
  c.articles = std::move(articles);
  return c;
}

}  // namespace fnd::test

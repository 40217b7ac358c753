module.exports = function pluralize(word, count) {
  if (count === 1) return word;
  if (/[sxz]$/.test(word)) return word + 'es';
  if (/y$/.test(word)) return word.slice(0, -1) + 'ies';
  return word + 's';
};

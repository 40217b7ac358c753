function safeParse(text, fallback) {
  try {
    return JSON.parse(text);
  } catch (err) {
    return fallback === undefined ? null : fallback;
  }
}

module.exports = safeParse;

const EMOJI = /[\u{1F300}-\u{1FAFF}]/gu;

module.exports = function strip(text) {
  return text.replace(EMOJI, '');
};

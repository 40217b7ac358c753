const PATTERN = /\u001b\[[0-9;]*m/g;

module.exports = function strip(text) {
  return text.replace(PATTERN, '');
};

module.exports = function join(...parts) {
  return parts
    .filter(Boolean)
    .join('/')
    .replace(/\/+/g, '/');
};

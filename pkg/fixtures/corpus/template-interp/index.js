module.exports = function render(template, values) {
  return template.replace(/\{\{(\w+)\}\}/g, (_, name) => {
    return name in values ? String(values[name]) : '';
  });
};

class FlowPanel {
    private Dimension preferredSize;

    private Dimension calculateFlowLayout(boolean bDoChilds) {
        int maxWidth = 0;
        if (getParent() != null && getParent() instanceof JViewport) {
            JViewport viewport = (JViewport) getParent();
            maxWidth = viewport.getExtentSize().width;
        } else if (getParent() != null) {
            maxWidth = getParent().getWidth();
        } else {
            maxWidth = getWidth();
        }
        Dimension d = m.getPreferredSize();
        return d;
    }

    public Dimension getPreferredSize() {
        return calculateFlowLayout(false);
    }
}

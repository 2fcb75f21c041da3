def execute_command(image):
    image_patch = ImagePatch(image)
    base_patches = image_patch.find('chair')
    item_patches = image_patch.find('backpack')
    filtered_items = []
    for patch in item_patches:
        if patch.verify_property('backpack', 'black'):
            filtered_items.append(patch)
    item_patches = filtered_items
    for base in base_patches:
        for item in item_patches:
            if item.vertical_center > base.vertical_center and base.overlaps_with(item.left, item.lower, item.right, item.upper):
                inputs = (base.horizontal_center, base.vertical_center)
                return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [base.left, base.lower, base.right, base.upper]}
    return {'function': 'None', 'error': 'No chair with a black backpack found.'}
